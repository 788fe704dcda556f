"""
Nilpotent orbit test cases
Orbit and local normal form evaluation, sl2 triples and the scan experiments
"""
import unittest
from fractions import Fraction

from asymptotic_hodge.demos import shipped
from asymptotic_hodge.exceptions import GridError, LocalNormalFormError, NoSolutionError
from asymptotic_hodge.instance_io import load_instance_data
from asymptotic_hodge.linear_core import DecFiltration, ExactComplex, Operator, Subspace
from asymptotic_hodge.metrics import MetricMode
from asymptotic_hodge.orbits.evaluation import (
    LocalNormalForm,
    SL2Data,
    alpha_threshold,
    check_lnf,
    grading_t,
    lnf_eval,
    orbit_eval,
    orbit_membership,
)
from asymptotic_hodge.orbits.scans import (
    ad_gamma_decay,
    distance_scan,
    p_function_scan,
    rel_compact_scan,
)
from asymptotic_hodge.orbits.sl2 import (
    SL2Triple,
    check_sl2_family,
    gamma_weight_profile,
    limit_split,
    nilp_conv_check,
    sl2_triple_cone,
    split_orbit_sl2,
)

I = ExactComplex(0, 1)


def upper_half_plane(z):
    """F^1 = ℂ(e0 + z e1)"""
    return DecFiltration({0: Subspace.full(2), 1: Subspace(2, [[1, z]])}, 2)


class TestOrbitEvaluation(unittest.TestCase):
    """θ(z) and the local normal form F(z)"""

    def setUp(self):
        self.loaded = load_instance_data(shipped("weight_one"))
        self.spec = self.loaded.orbit_spec()
        self.N = self.spec.nilpotents[0]

    def test_orbit_point(self):
        """θ(z)^1 = ℂ(e0 + z e1)"""
        self.assertEqual(orbit_eval(self.spec, [I]), upper_half_plane(I))

    def test_membership_in_upper_half_plane(self):
        """θ(z) ∈ M exactly when Im z > 0"""
        self.assertTrue(orbit_membership(self.spec, [2 * I]).passed)
        self.assertFalse(orbit_membership(self.spec, [-I]).passed)

    def test_alpha_threshold(self):
        """Any positive imaginary part already lies in M"""
        alpha = alpha_threshold(self.spec, steps=40)
        self.assertGreater(alpha, 0)
        self.assertLessEqual(alpha, Fraction(1, 2 ** 39))

    def test_deck_reduction(self):
        """z = 3/2 + i splits into m = 1 and z' = 1/2 + i"""
        z = [ExactComplex(Fraction(3, 2), 1)]
        value = lnf_eval(self.spec, self.loaded.gamma, z)
        self.assertEqual(value.shift, [1])
        self.assertEqual(value.translation, [ExactComplex(Fraction(1, 2), 1)])

    def test_deck_invariance(self):
        """F(z + 1) = e^{N}·F(z) exactly"""
        z = ExactComplex(Fraction(1, 3), 2)
        here = lnf_eval(self.spec, self.loaded.gamma, [z]).filtration
        there = lnf_eval(self.spec, self.loaded.gamma, [z + 1]).filtration
        self.assertEqual(there, here.apply(self.N.exp()))

    def test_lnf_without_gamma_is_orbit(self):
        """Γ = 0 reduces F(z) to θ(z)"""
        z = [ExactComplex(Fraction(1, 4), 3)]
        value = lnf_eval(self.spec, None, z)
        self.assertEqual(value.filtration, orbit_eval(self.spec, z))

    def test_check_lnf(self):
        """Γ(0) must vanish"""
        check_lnf(self.spec, self.loaded.gamma)
        bad = LocalNormalForm({(0,): self.N}, 1, 2)
        with self.assertRaises(LocalNormalFormError) as ctx:
            check_lnf(self.spec, bad)
        self.assertEqual(ctx.exception.clause, "constant_term")


class TestGradingT(unittest.TestCase):
    """t(y) = y^{−Y_0/2} y^{−H/2}"""

    def setUp(self):
        self.sl2 = SL2Data([Operator.diagonal([1, -1])], Operator.identity(2))

    def test_exact_power(self):
        """Rational exponents stay exact"""
        expected = Operator.diagonal([Fraction(1, 4), 1])
        self.assertEqual(grading_t(self.sl2, [4]), expected)

    def test_positive_y(self):
        """y must be positive"""
        with self.assertRaises(GridError):
            grading_t(self.sl2, [0])


class TestSL2(unittest.TestCase):
    """sl2 triples attached to the limit"""

    def setUp(self):
        self.spec = load_instance_data(shipped("weight_one")).orbit_spec()

    def test_one_variable_triple(self):
        """H = diag(1, −1) and N⁺ = E_01"""
        triple = sl2_triple_cone(self.spec, [1])
        self.assertTrue(all(triple.relations().values()))
        self.assertEqual(triple.H, Operator.diagonal([1, -1]))
        self.assertEqual(triple.N_plus, Operator.unit(2, 0, 1))

    def test_nilpotent_orbit_convergence(self):
        """e^{iyN}·F̂ = e^{−(i/y)N⁺}·Φ"""
        triple = sl2_triple_cone(self.spec, [1])
        _, hat = limit_split(self.spec)
        for y in (1, 2, Fraction(1, 3)):
            self.assertTrue(nilp_conv_check(triple, hat, 1, y))

    def test_split_orbit_sl2(self):
        """Y_0 = k and H = Y − k in the pure one-variable case"""
        data = split_orbit_sl2(self.spec)
        self.assertEqual(data.Y0, Operator.identity(2))
        self.assertEqual(data.H, [Operator.diagonal([1, -1])])

    def test_split_orbit_sl2_unsupported(self):
        """Mixed data with M != W needs explicit sl2 input"""
        spec = load_instance_data(shipped("non_inv")).orbit_spec()
        with self.assertRaises(NoSolutionError):
            split_orbit_sl2(spec)


class TestSL2Family(unittest.TestCase):
    """Commuting triples and the weight profile of Γ"""

    def block_triple(self, offset):
        """(E_{o+1,o}, diag(1, −1), E_{o,o+1}) on the block starting at offset"""
        H = [0, 0, 0, 0]
        H[offset], H[offset + 1] = 1, -1
        return SL2Triple(
            Operator.unit(4, offset + 1, offset),
            Operator.diagonal(H),
            Operator.unit(4, offset, offset + 1),
        )

    def test_commuting_family(self):
        """(Σ y_j N_j, Σ H_j, Σ y_j^{−1} N_j⁺) is again a triple"""
        triples = [self.block_triple(0), self.block_triple(2)]
        relations = check_sl2_family(triples, [2, 3])
        self.assertTrue(all(relations.values()))

    def test_non_commuting_family(self):
        """Triples on the same block do not commute"""
        with self.assertRaises(NoSolutionError):
            check_sl2_family([self.block_triple(0), self.block_triple(1)], [1, 1])

    def test_gamma_weight_profile(self):
        """Γ = s·E_30 sits in ad Y^1 weight −2"""
        loaded = load_instance_data(shipped("biext"))
        result = gamma_weight_profile(
            loaded.orbit_spec(), loaded.gamma, loaded.require_sl2(), [I]
        )
        self.assertTrue(result["passed"])
        self.assertEqual(len(result["profile"]), 1)
        self.assertEqual(list(result["profile"][0]["components"]), ["-2"])
        self.assertEqual(result["profile"][0]["violations"], [])


class TestScans(unittest.TestCase):
    """Decay, distance, relative compactness and P-function scans"""

    def setUp(self):
        self.loaded = load_instance_data(shipped("weight_one"))
        self.spec = self.loaded.orbit_spec()
        self.sl2 = split_orbit_sl2(self.spec)
        self.ray = [[ExactComplex(0, y)] for y in (5, 10, 20, 40)]

    def test_gamma_decay(self):
        """Ad(e^{N(z)})Γ(s) = s·N decays like e^{−2πm}"""
        report = ad_gamma_decay(self.spec, self.loaded.gamma)
        self.assertTrue(report.passed)
        self.assertLess(report.fit["final"], 1e-8)

    def test_distance_scan_weak_bound(self):
        """log d̃ + 2πy falls off like −log y on y ∈ [5, 40]"""
        report = distance_scan(
            self.spec, self.loaded.gamma, self.ray, MetricMode.STANDARD
        )
        self.assertTrue(report.passed)
        self.assertEqual(len(report.records), 4)
        self.assertTrue(report.fit["lower_bound_waived"])
        self.assertGreater(report.fit["weak"]["slope"], -1.5)
        self.assertLess(report.fit["weak"]["slope"], -0.5)

    def test_distance_scan_rejects_grid(self):
        """Points with y < 1 are outside I'"""
        with self.assertRaises(GridError):
            below = [[ExactComplex(0, Fraction(1, 2))]]
            distance_scan(self.spec, self.loaded.gamma, below)

    def test_rel_compact_scan(self):
        """The twisted points stay near ℂ(e0 + i e1)"""
        points = [
            [ExactComplex(Fraction(x, 4), y)] for x in (0, 1, 3) for y in (1, 2, 4)
        ]
        points.sort(key=lambda z: z[0].im)
        report = rel_compact_scan(
            self.spec, self.loaded.gamma, self.sl2, points, eta=1e-2
        )
        self.assertTrue(report.fit["all_in_M"])
        self.assertTrue(report.passed)

    def test_p_function_scan(self):
        """Ad(t^{−1}(y))e^{iyN} is constant in y"""
        report = p_function_scan(self.spec, self.sl2, samples=7)
        self.assertTrue(report.passed)
        self.assertEqual(report.fit["rays"], 1)


if __name__ == '__main__':
    unittest.main()
