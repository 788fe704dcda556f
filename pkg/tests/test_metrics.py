"""
Hodge metric test cases
Standard and twisted metrics, the twist factor τ, scaling laws
and the distance surrogate
"""
import math
import unittest
from fractions import Fraction

from asymptotic_hodge.demos import shipped
from asymptotic_hodge.exceptions import (
    DimensionMismatchError,
    NotInClassifyingSpaceError,
    OutOfChartError,
)
from asymptotic_hodge.instance_io import load_instance_data
from asymptotic_hodge.linear_core import DecFiltration, ExactComplex, Subspace
from asymptotic_hodge.metrics import (
    MetricMode,
    TwistSource,
    basic_bound,
    chart_point,
    distance_surrogate,
    hodge_metric,
    scaling_ratio,
    tau,
    twist_bound_ratio,
    twisted_norm,
    vector_norm,
)
from asymptotic_hodge.mhs import deligne_bigrading, delta_splitting

I = ExactComplex(0, 1)
PURE_HS = {
    "hodge_filtration": {
        "0": [["1", "0"], ["0", "1"]],
        "1": [["1", {"re": "0", "im": "1"}]],
    },
    "nilpotents": [],
    "gamma": {},
}


def weight_one_filtration(z):
    """F^1 = ℂ(e0 + z e1)"""
    return DecFiltration({0: Subspace.full(2), 1: Subspace(2, [[1, z]])}, 2)


class TestHodgeMetric(unittest.TestCase):
    """The standard mixed Hodge metric"""

    def setUp(self):
        self.pure = load_instance_data(shipped("weight_one", PURE_HS)).instance
        self.biext = load_instance_data(shipped("biext_static")).instance

    def test_norm_of_hodge_vector(self):
        """h(e0 + i e1, e0 + i e1) = 2"""
        ctx = hodge_metric(self.pure)
        self.assertAlmostEqual(vector_norm([1, I], ctx), math.sqrt(2), places=12)

    def test_gram_is_hermitian_positive(self):
        """The Gram matrix in the adapted basis is positive definite"""
        ctx = hodge_metric(self.biext)
        self.assertTrue((abs(ctx.gram - ctx.gram.conj().T) < 1e-12).all())
        self.assertEqual(len(ctx.labels), 4)

    def test_rejects_points_outside_M(self):
        """Limit filtrations are not in M"""
        base = load_instance_data(shipped("weight_one")).instance
        with self.assertRaises(NotInClassifyingSpaceError):
            hodge_metric(base)

    def test_context_json(self):
        """Serialized context records the mode and τ"""
        data = hodge_metric(self.biext, MetricMode.TWISTED).to_json()
        self.assertEqual(data["mode"], "twisted")
        self.assertAlmostEqual(data["tau"], 1.5, places=12)


class TestTwistFactor(unittest.TestCase):
    """τ(F) = 1 + Σ ‖δ^{p,q}‖^{−2/(p+q)}"""

    def setUp(self):
        self.pure = load_instance_data(shipped("weight_one", PURE_HS)).instance
        self.biext = load_instance_data(shipped("biext_static")).instance

    def test_split_point(self):
        """τ = 1 exactly when δ = 0"""
        self.assertEqual(tau(self.pure), 1.0)

    def test_biextension(self):
        """‖δ‖ = 1/2 so τ = 3/2"""
        self.assertAlmostEqual(tau(self.biext), 1.5, places=12)

    def test_epsilon_source_agrees_for_short_weights(self):
        """‖ε‖ = ‖iδ‖ when the weights span at most two"""
        self.assertAlmostEqual(tau(self.biext, TwistSource.EPSILON), 1.5, places=12)

    def test_basic_bound(self):
        """τ(y^{−Y/2}F) − 1 scales linearly in y"""
        Y = deligne_bigrading(delta_splitting(self.biext)[1]).grading()
        result = basic_bound(self.biext, Y, [1, 4, 16])
        self.assertAlmostEqual(result["C"], 0.5, places=12)
        for record in result["records"]:
            self.assertAlmostEqual(record["tau"], record["predicted"], places=9)


class TestTwistedNorm(unittest.TestCase):
    """The twisted norm rescales I^{p,q} by τ^{(p+q)/2}"""

    def setUp(self):
        self.pure = load_instance_data(shipped("weight_one", PURE_HS)).instance
        self.biext = load_instance_data(shipped("biext_static")).instance
        self.standard = hodge_metric(self.biext)

    def test_split_point_keeps_standard_norm(self):
        """τ = 1 at a split point"""
        for v in ([1, I], [1, 0], [0, 1]):
            self.assertAlmostEqual(
                twisted_norm(v, self.pure),
                vector_norm(v, hodge_metric(self.pure)),
                places=12,
            )

    def test_weight_zero_unchanged(self):
        """I^{0,0} = ℂ(e0 + (i/2)e3) has p + q = 0"""
        v = [1, 0, 0, ExactComplex(0, Fraction(1, 2))]
        self.assertAlmostEqual(
            twisted_norm(v, self.biext), vector_norm(v, self.standard), places=12
        )

    def test_lower_weights_scaled(self):
        """e3 ∈ I^{−1,−1} and e1 + i e2 ∈ I^{0,−1} shrink by τ^{(p+q)/2}"""
        for v, weight in (([0, 0, 0, 1], -2), ([0, 1, I, 0], -1)):
            expected = 1.5 ** (weight / 2) * vector_norm(v, self.standard)
            self.assertAlmostEqual(twisted_norm(v, self.biext), expected, places=12)


class TestScalingLaws(unittest.TestCase):
    """Norms under y^{αY} for a real grading Y of W"""

    def setUp(self):
        self.biext = load_instance_data(shipped("biext_static")).instance
        self.Y = deligne_bigrading(delta_splitting(self.biext)[1]).grading()

    def test_scaling_ratio(self):
        """v ∈ I^{p,q} scales by y^{α(p+q)}"""
        half = Fraction(1, 2)
        cases = (
            (4, half, [0, 0, 0, 1], 0.25),
            (9, -half, [0, 1, I, 0], 3.0),
            (9, half, [1, 0, 0, ExactComplex(0, half)], 1.0),
        )
        for y, alpha, v, expected in cases:
            ratio = scaling_ratio(self.biext, self.Y, y, alpha, v)
            self.assertAlmostEqual(ratio, expected, places=12)

    def test_twist_bound_ratio(self):
        """The twisted ratio matches ((y^{−1} + τ − 1)/τ)^{(p+q)/2}"""
        for y in (2, 10, 100):
            measured, predicted = twist_bound_ratio(self.biext, self.Y, y, [0, 0, 0, 1])
            self.assertAlmostEqual(measured, predicted, places=10)
        _, predicted = twist_bound_ratio(self.biext, self.Y, 2, [0, 0, 0, 1])
        self.assertAlmostEqual(predicted, 1.5, places=12)

    def test_twist_bound_needs_pure_type(self):
        """e0 is not in a single I^{p,q}"""
        with self.assertRaises(DimensionMismatchError):
            twist_bound_ratio(self.biext, self.Y, 2, [1, 0, 0, 0])


class TestDistanceSurrogate(unittest.TestCase):
    """Path length along e^{tu}·F"""

    def setUp(self):
        self.pure = load_instance_data(shipped("weight_one", PURE_HS)).instance

    def test_zero_distance(self):
        """d(F, F) = 0"""
        self.assertEqual(distance_surrogate(self.pure, self.pure.F), 0.0)

    def test_positive_distance(self):
        """Moving up the imaginary axis costs a positive length"""
        far = weight_one_filtration(2 * I)
        nearer = weight_one_filtration(ExactComplex(0, Fraction(3, 2)))
        d_far = distance_surrogate(self.pure, far)
        d_near = distance_surrogate(self.pure, nearer)
        self.assertGreater(d_far, 0.0)
        self.assertGreater(d_far, d_near)

    def test_out_of_chart(self):
        """The conjugate filtration is outside the big cell"""
        with self.assertRaises(OutOfChartError):
            chart_point(self.pure, weight_one_filtration(-I))

    def test_chart_point_is_in_q(self):
        """u lowers the Hodge level"""
        point = chart_point(self.pure, weight_one_filtration(2 * I))
        self.assertFalse(point.u_adapted.is_zero())
        self.assertEqual(self.pure.F.apply(point.flow(1)), weight_one_filtration(2 * I))


if __name__ == '__main__':
    unittest.main()
