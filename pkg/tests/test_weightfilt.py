"""
Weight filtration test cases
Monodromy weight filtrations, relative weight filtrations and admissibility checks
"""
import unittest
from types import SimpleNamespace

from asymptotic_hodge.demos import shipped
from asymptotic_hodge.exceptions import NotNilpotentError, RelativeFiltrationError
from asymptotic_hodge.instance_io import load_instance_data
from asymptotic_hodge.linear_core import (
    DecFiltration,
    IncFiltration,
    Operator,
    Subspace,
)
from asymptotic_hodge.weightfilt import (
    NilpotentData,
    check_admissible_orbit,
    monodromy_weight_filtration,
    relative_weight_filtration,
)


def e(i, n):
    return [1 if j == i else 0 for j in range(n)]


class TestMonodromyWeightFiltration(unittest.TestCase):
    """W(N) of a single nilpotent"""

    def setUp(self):
        self.N = Operator.unit(3, 1, 0) + Operator.unit(3, 2, 1)

    def test_jordan_block(self):
        """A 3x3 Jordan block has weights −2, 0, 2"""
        M = monodromy_weight_filtration(self.N)
        self.assertEqual(M.weights(), [-2, 0, 2])
        self.assertEqual(M[-2], Subspace(3, [e(2, 3)]))
        self.assertEqual(M[0], Subspace(3, [e(1, 3), e(2, 3)]))
        self.assertEqual(M[2], Subspace.full(3))

    def test_shifted_center(self):
        """Centering at k shifts every weight by k"""
        self.assertEqual(monodromy_weight_filtration(self.N, 1).weights(), [-1, 1, 3])

    def test_nilpotent_data(self):
        """Order of nilpotency and the attached filtration"""
        data = NilpotentData(self.N)
        self.assertEqual(data.order, 3)
        self.assertEqual(data.weight_filtration().length(), 5)

    def test_rejects_non_nilpotent(self):
        """The identity has no weight filtration"""
        with self.assertRaises(NotNilpotentError):
            NilpotentData(Operator.identity(2))

    def test_zero_operator(self):
        """N = 0 gives the trivial filtration at the center"""
        M = monodromy_weight_filtration(Operator.zero(2), 3)
        self.assertEqual(M.weights(), [3])


class TestRelativeWeightFiltration(unittest.TestCase):
    """M(N, W)"""

    def setUp(self):
        self.non_inv = load_instance_data(shipped("non_inv")).orbit_spec()
        # W_{-1} = ℂe1，N e0 = e1：M 不存在
        self.W_bad = IncFiltration({-1: Subspace(2, [e(1, 2)]), 0: Subspace.full(2)}, 2)
        self.N_bad = Operator.unit(2, 1, 0)

    def test_non_invariant_example(self):
        """M_{−4} = ℂe3, M_{−2} = ⟨e2, e3⟩, M_0 = V"""
        spec = self.non_inv
        M = relative_weight_filtration(spec.total_nilpotent(), spec.W)
        self.assertEqual(M.weights(), [-4, -2, 0])
        self.assertEqual(M[-4], Subspace(4, [e(3, 4)]))
        self.assertEqual(M[-2], Subspace(4, [e(2, 4), e(3, 4)]))
        self.assertEqual(M[0], Subspace.full(4))

    def test_matches_monodromy_filtration_when_pure(self):
        """For a single weight k, M(N, W) = W(N)[−k]"""
        N = Operator.unit(2, 1, 0)
        W = IncFiltration({1: Subspace.full(2)}, 2)
        self.assertEqual(
            relative_weight_filtration(N, W), monodromy_weight_filtration(N, 1)
        )

    def test_nonexistent(self):
        """N carrying weight 0 into weight −1 admits no relative filtration"""
        with self.assertRaises(RelativeFiltrationError):
            relative_weight_filtration(self.N_bad, self.W_bad)

    def test_must_preserve_W(self):
        """N must preserve W"""
        N = Operator.unit(2, 0, 1)
        with self.assertRaises(RelativeFiltrationError):
            relative_weight_filtration(N, self.W_bad)


class TestAdmissibility(unittest.TestCase):
    """Admissible nilpotent orbit data"""

    def setUp(self):
        names = ("non_inv", "non_conv", "weight_one")
        self.loaded = {name: load_instance_data(shipped(name)) for name in names}

    def test_shipped_orbits_are_admissible(self):
        """Every shipped orbit passes all clauses"""
        for name, loaded in self.loaded.items():
            report = check_admissible_orbit(loaded.orbit_spec())
            self.assertTrue(report.passed, name)
            self.assertIsNotNone(report.M)

    def test_report_json(self):
        """The report serializes its clauses and M"""
        data = check_admissible_orbit(self.loaded["non_inv"].orbit_spec()).to_json()
        self.assertTrue(data["passed"])
        self.assertIsNone(data["failed_clause"])
        self.assertIn("minus_one_morphisms", data["clauses"])

    def test_missing_relative_filtration(self):
        """The first failing clause is relative_weight_exists"""
        W = IncFiltration({-1: Subspace(2, [e(1, 2)]), 0: Subspace.full(2)}, 2)
        F = DecFiltration({-1: Subspace.full(2), 0: Subspace(2, [e(0, 2)])}, 2)
        spec = SimpleNamespace(nilpotents=[Operator.unit(2, 1, 0)], F_inf=F, W=W)
        report = check_admissible_orbit(spec)
        self.assertFalse(report.passed)
        self.assertEqual(report.failed_clause, "relative_weight_exists")
        self.assertIsNone(report.M)

    def test_non_commuting(self):
        """Non-commuting nilpotents are rejected"""
        W = IncFiltration({0: Subspace.full(3)}, 3)
        F = DecFiltration({-2: Subspace.full(3), 0: Subspace(3, [e(0, 3)])}, 3)
        nilpotents = [Operator.unit(3, 1, 0), Operator.unit(3, 2, 1)]
        spec = SimpleNamespace(nilpotents=nilpotents, F_inf=F, W=W)
        self.assertEqual(check_admissible_orbit(spec).failed_clause, "commute")


if __name__ == '__main__':
    unittest.main()
