"""
Mixed Hodge structure test cases
Validation against the classifying space, Deligne bigradings and the δ / sl2 splittings
"""
import unittest
from fractions import Fraction

from asymptotic_hodge.demos import shipped
from asymptotic_hodge.exceptions import NotMixedHodgeError, UnsupportedLengthError
from asymptotic_hodge.instance_io import load_instance_data
from asymptotic_hodge.linear_core import ExactComplex, Operator, Subspace
from asymptotic_hodge.mhs import (
    ValidationStatus,
    bigrading_of,
    delta_splitting,
    deligne_bigrading,
    hodge_numbers_of,
    is_r_split,
    lie_algebra_basis,
    sl2_splitting,
    validate_instance,
)

I = ExactComplex(0, 1)
J = {"re": "0", "im": "1"}

# 权 1 的纯 Hodge 结构 F^1 = ℂ(e0 + i e1)
PURE_HS = {
    "hodge_filtration": {"0": [["1", "0"], ["0", "1"]], "1": [["1", J]]},
    "nilpotents": [],
    "gamma": {},
}

# 权 0 与 −4 的分裂结构，权跨度 4
WIDE = {
    "schema": 1,
    "name": "wide",
    "dimension": 2,
    "weight_filtration": {"-4": [["0", "1"]], "0": [["1", "0"], ["0", "1"]]},
    "hodge_filtration": {"-2": [["1", "0"], ["0", "1"]], "0": [["1", "0"]]},
    "hodge_numbers": {"0,0": 1, "-2,-2": 1},
    "polarizations": {
        "0": {"lift_basis": [["1", "0"]], "form": [["1"]]},
        "-4": {"lift_basis": [["0", "1"]], "form": [["1"]]},
    },
}


class TestValidation(unittest.TestCase):
    """Membership in M versus the compact dual"""

    def setUp(self):
        self.pure = load_instance_data(shipped("weight_one", PURE_HS)).instance
        self.orbit_base = load_instance_data(shipped("weight_one")).instance
        self.biext = load_instance_data(shipped("biext_static")).instance

    def test_pure_hodge_structure_in_M(self):
        """A weight one Hodge structure with positive form"""
        report = validate_instance(self.pure)
        self.assertTrue(report.passed)
        self.assertIsNone(report.failed_clause)
        self.assertGreater(report.positivity_margin, 0)

    def test_biextension_in_M(self):
        """The static biextension is a graded-polarized MHS"""
        self.assertEqual(validate_instance(self.biext).status, ValidationStatus.IN_M)

    def test_limit_filtration_only_in_compact_dual(self):
        """A real F^1 fails the Hodge decomposition but lies in the compact dual"""
        report = validate_instance(self.orbit_base)
        self.assertEqual(report.status, ValidationStatus.IN_COMPACT_DUAL_ONLY)
        self.assertEqual(report.failed_clause, "hodge_decomposition")

    def test_asymmetric_hodge_numbers(self):
        """h^{p,q} != h^{q,p} is invalid"""
        doc = shipped("weight_one", dict(PURE_HS, hodge_numbers={"1,0": 2, "0,1": 0}))
        report = validate_instance(load_instance_data(doc).instance)
        self.assertEqual(report.status, ValidationStatus.INVALID)
        self.assertEqual(report.failed_clause, "hodge_symmetry")

    def test_missing_polarization(self):
        """Every weight needs a polarization"""
        doc = shipped("weight_one", dict(PURE_HS, polarizations={}))
        report = validate_instance(load_instance_data(doc).instance)
        self.assertEqual(report.failed_clause, "polarization_missing")

    def test_hodge_numbers_of(self):
        """Hodge numbers read off the non-invariant example"""
        inst = load_instance_data(shipped("non_inv")).instance
        self.assertEqual(
            hodge_numbers_of(inst.F, inst.W),
            {(0, 0): 1, (0, -2): 1, (-1, -1): 1, (-2, 0): 1},
        )


class TestBigrading(unittest.TestCase):
    """Deligne bigradings"""

    def setUp(self):
        self.pure = load_instance_data(shipped("weight_one", PURE_HS)).instance
        self.biext = load_instance_data(shipped("biext_static")).instance
        self.non_inv = load_instance_data(shipped("non_inv"))

    def test_pure_bigrading(self):
        """I^{1,0} and I^{0,1} of a pure structure are conjugate"""
        b = deligne_bigrading(self.pure)
        self.assertEqual(b.types, [(0, 1), (1, 0)])
        self.assertEqual(b.piece(1, 0), Subspace(2, [[1, I]]))
        self.assertTrue(b.is_r_split())

    def test_biextension_bigrading(self):
        """I^{0,0} carries the extension class and is not real"""
        b = deligne_bigrading(self.biext)
        self.assertEqual(b.piece(0, 0), Subspace(4, [[1, 0, 0, I * Fraction(1, 2)]]))
        self.assertEqual(b.piece(-1, -1), Subspace(4, [[0, 0, 0, 1]]))
        self.assertEqual(b.piece(0, -1), Subspace(4, [[0, 1, I, 0]]))
        self.assertFalse(b.is_r_split())

    def test_grading_operator(self):
        """Y acts by p + q on each piece"""
        b = deligne_bigrading(self.biext)
        Y = b.grading()
        self.assertEqual(Y.apply([0, 0, 0, 1]), [0, 0, 0, -2])
        self.assertEqual(Y.apply([1, 0, 0, I / 2]), [0, 0, 0, 0])

    def test_limit_bigrading(self):
        """The limit MHS of the non-invariant example"""
        spec = self.non_inv.orbit_spec()
        b = bigrading_of(spec.F_inf, spec.limit_weight_filtration())
        self.assertEqual(b.types, [(-2, -2), (-1, -1), (0, 0)])
        self.assertEqual(b.piece(0, 0), Subspace(4, [[1, 0, 0, 0], [0, 1, 0, 0]]))
        self.assertEqual(b.piece(-1, -1), Subspace(4, [[0, 0, 1, 0]]))
        self.assertEqual(b.piece(-2, -2), Subspace(4, [[0, 0, 0, 1]]))

    def test_not_mixed_hodge(self):
        """(F_∞, W) itself is not an MHS"""
        inst = self.non_inv.instance
        with self.assertRaises(NotMixedHodgeError):
            bigrading_of(inst.F, inst.W)


class TestSplittings(unittest.TestCase):
    """δ-splitting and sl2-splitting"""

    def setUp(self):
        self.pure = load_instance_data(shipped("weight_one", PURE_HS)).instance
        self.biext = load_instance_data(shipped("biext_static")).instance

    def test_split_input_has_zero_delta(self):
        """An R-split structure is its own splitting"""
        delta, split = delta_splitting(self.pure)
        self.assertTrue(delta.is_zero())
        self.assertEqual(split.F, self.pure.F)

    def test_biextension_delta(self):
        """δ = (1/2)·E_30 and e^{−iδ}F is R-split"""
        delta, split = delta_splitting(self.biext)
        self.assertEqual(delta, Operator.unit(4, 3, 0).scale(Fraction(1, 2)))
        self.assertTrue(delta.is_real())
        self.assertEqual(split.F[0], Subspace(4, [[1, 0, 0, 0], [0, 1, I, 0]]))
        self.assertTrue(is_r_split(split))

    def test_sl2_splitting_short_weights(self):
        """ε = iδ when the weights span at most two"""
        epsilon, split = sl2_splitting(self.biext)
        self.assertEqual(epsilon, Operator.unit(4, 3, 0).scale(I / 2))
        self.assertTrue(is_r_split(split))

    def test_sl2_splitting_unsupported(self):
        """Weight span four is outside the supported case"""
        inst = load_instance_data(WIDE).instance
        with self.assertRaises(UnsupportedLengthError):
            sl2_splitting(inst)


class TestLieAlgebra(unittest.TestCase):
    """Infinitesimal isometries"""

    def setUp(self):
        self.pure = load_instance_data(shipped("weight_one", PURE_HS)).instance
        self.Q = Operator([[0, 1], [-1, 0]])

    def test_symplectic_algebra(self):
        """g is sl(2) = sp(2) for a weight one structure of rank two"""
        basis = lie_algebra_basis(self.pure)
        self.assertEqual(len(basis), 3)
        for X in basis:
            self.assertTrue((X.transpose() @ self.Q + self.Q @ X).is_zero())


if __name__ == '__main__':
    unittest.main()
