import numpy as np
import pytest

from braidforge import decomp, espgroup, linalg
from braidforge.espgroup import GroupElement
from braidforge.reps import PhaseParams, RepSpec


def test_character_examples():
    spec = RepSpec.class2(2, 3, 2)
    assert decomp.character(spec, GroupElement.identity(2)) == spec.dim
    assert decomp.character(spec, GroupElement.minus_one(2)) == -spec.dim
    assert decomp.character(spec, GroupElement.generator(2, 1)) == 0
    with pytest.raises(espgroup.GroupMismatch):
        decomp.character(spec, GroupElement.identity(3))


@pytest.mark.parametrize("spec", [RepSpec.class1(m, 1) for m in range(1, 7)]
                         + [RepSpec.class2(m, 3, 2) for m in range(1, 7)]
                         + [RepSpec.class1(3, 2, PhaseParams.from_angles([0.2, 1.1]))])
def test_noncentral_characters_vanish(spec):
    assert decomp.max_noncentral_character(spec) <= 1e-9


def test_multiplicity_examples():
    assert decomp.multiplicity_rho1(RepSpec.class2(2, 3, 2)) == 16
    assert decomp.multiplicity_rho1(RepSpec.class1(2, 1)) == 4
    with pytest.raises(ValueError, match="commutant_dimension"):
        decomp.multiplicity_rho1(RepSpec.class1(3, 1))


@pytest.mark.parametrize("spec", [RepSpec.class1(2, 1), RepSpec.class1(4, 1),
                                  RepSpec.class2(2, 2, 1), RepSpec.class2(4, 2, 1),
                                  RepSpec.class1(2, 2), RepSpec.class1(4, 1, PhaseParams.from_angles([0.8]))])
def test_multiplicity_times_irreducible_dim(spec):
    assert decomp.multiplicity_rho1(spec) * 2 ** (spec.m // 2) == spec.dim


def test_commutant_examples():
    assert decomp.commutant_dimension(RepSpec.class1(2, 1)) == 16
    assert decomp.commutant_dimension(RepSpec.class1(3, 1)) == 32
    with pytest.raises(linalg.SizeError):
        decomp.commutant_dimension(RepSpec.class1(6, 1))


@pytest.mark.parametrize("spec", [RepSpec.class1(1, 1), RepSpec.class1(2, 1), RepSpec.class1(3, 1),
                                  RepSpec.class2(1, 3, 2), RepSpec.class2(2, 2, 1),
                                  RepSpec.class2(3, 2, 1), RepSpec.class1(1, 2)])
def test_commutant_matches_dense_oracle(spec):
    fast = decomp.commutant_dimension(spec)
    assert fast == decomp.commutant_dimension_dense(spec)
    assert fast >= 1


def test_commutant_of_broken_rep_matches_dense_oracle():
    spec = RepSpec.class2(3, 3, 1)  # far-commutation fails; dim 32
    assert decomp.commutant_dimension(spec) == decomp.commutant_dimension_dense(spec)


def test_prediction_fields():
    p = decomp.prediction(RepSpec.class2(2, 3, 2))
    assert (p.parity, p.multiplicity, p.formula_multiplicity, p.irreducible_dim) == ("odd", 16, 16, 2)
    assert p.commutant == 256
    q = decomp.prediction(RepSpec.class1(3, 1))
    assert (q.parity, q.multiplicity, q.commutant) == ("even", 4, 32)


@pytest.mark.parametrize("spec", [RepSpec.class1(2, 1), RepSpec.class1(3, 1), RepSpec.class1(2, 2),
                                  RepSpec.class2(2, 3, 2), RepSpec.class2(3, 2, 1)])
def test_verify_decomposition(spec):
    report = decomp.verify_decomposition(spec)
    assert report.passed, report.failures()
