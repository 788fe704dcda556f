"""
Property-based test cases
Bigrading axioms, δ-splitting, metric scaling laws and basis-change invariance over
seeded random structures
"""
import random
import unittest
from fractions import Fraction

from hypothesis import assume, given, settings
from hypothesis import strategies as st

from asymptotic_hodge.demos import random_instance, random_lnf_spec, shipped
from asymptotic_hodge.instance_io import load_instance_data
from asymptotic_hodge.linear_core import Operator
from asymptotic_hodge.metrics import (
    MetricMode,
    basic_bound,
    distance_surrogate,
    scaling_ratio,
    twist_bound_ratio,
)
from asymptotic_hodge.mhs import (
    deligne_bigrading,
    delta_splitting,
    grading_Y,
    is_r_split,
    validate_instance,
)
from asymptotic_hodge.orbits.scans import ad_gamma_decay

seeds = st.integers(min_value=0, max_value=10_000)
PROFILE = settings(max_examples=25, deadline=None)
THOROUGH = settings(max_examples=200, deadline=None)
SCALING = settings(max_examples=50, deadline=None)
TWIST = settings(max_examples=20, deadline=None)
RELATIVE = 1e-10


def real_unipotent(n, seed):
    """随机的实上三角幺幂算子"""
    rng = random.Random(seed)
    g = Operator.identity(n)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.5:
                g = g + Operator.unit(n, i, j).scale(rng.randint(-3, 3))
    return g


def split_grading(inst):
    """δ 分裂点的实分次 Y"""
    return grading_Y(deligne_bigrading(delta_splitting(inst)[1]))


def pick_hodge_vector(inst, index):
    """按 index 取某个 I^{p,q} 的基向量"""
    pieces = sorted(deligne_bigrading(inst).pieces.items())
    (p, q), space = pieces[index % len(pieces)]
    return (p, q), space.basis[0]


class TestGeneratorShapes(unittest.TestCase):
    """random_instance spans the advertised dimensions and weight lengths"""

    @PROFILE
    @given(
        seeds,
        st.integers(min_value=2, max_value=8),
        st.integers(min_value=1, max_value=4),
    )
    def test_shape_parameters_respected(self, seed, max_dim, max_weights):
        """1 ≤ dim ≤ max_dim and 1 ≤ #weights ≤ max_weights"""
        inst = random_instance(seed, max_dim, max_weights)
        self.assertGreaterEqual(inst.dim, 1)
        self.assertLessEqual(inst.dim, max_dim)
        self.assertGreaterEqual(len(inst.W.weights()), 1)
        self.assertLessEqual(len(inst.W.weights()), max_weights)
        self.assertTrue(validate_instance(inst).passed)

    def test_default_shapes_covered(self):
        """Seeds 0..199 reach dimension 8 and every weight length from 1 to 4"""
        dims, lengths = set(), set()
        for seed in range(200):
            inst = random_instance(seed)
            dims.add(inst.dim)
            lengths.add(len(inst.W.weights()))
        self.assertEqual(max(dims), 8)
        self.assertEqual(lengths, {1, 2, 3, 4})


class TestBigradingProperties(unittest.TestCase):
    """Deligne bigradings of random graded-polarized structures"""

    @PROFILE
    @given(seeds)
    def test_random_instance_in_M(self, seed):
        """The generator lands in the classifying space"""
        self.assertTrue(validate_instance(random_instance(seed)).passed)

    @THOROUGH
    @given(seeds)
    def test_bigrading_axioms(self, seed):
        """V = ⊕I^{p,q}, I^{p,q} ⊆ F^p ∩ W_{p+q}, dim I^{p,q} = h^{p,q}"""
        inst = random_instance(seed)
        b = deligne_bigrading(inst)
        self.assertEqual(sum(space.dim for space in b.pieces.values()), inst.dim)
        for (p, q), space in b.pieces.items():
            self.assertTrue(space.issubset(inst.F[p]))
            self.assertTrue(space.issubset(inst.W[p + q]))
            self.assertEqual(space.dim, inst.hodge_numbers.get((p, q), 0))

    @PROFILE
    @given(seeds)
    def test_grading_preserves_weight_filtration(self, seed):
        """Y acts on W_k with eigenvalues at most k"""
        inst = random_instance(seed)
        Y = grading_Y(deligne_bigrading(inst))
        for k in range(inst.W.lo, inst.W.hi + 1):
            self.assertTrue(inst.W[k].image(Y).issubset(inst.W[k]))


class TestSplittingProperties(unittest.TestCase):
    """δ-splitting"""

    @PROFILE
    @given(seeds)
    def test_delta_real_and_lowering(self, seed):
        """δ is real, lies in Λ^{-1,-1} and e^{−iδ}F is R-split"""
        inst = random_instance(seed)
        delta, split = delta_splitting(inst)
        self.assertTrue(delta.is_real())
        self.assertTrue(deligne_bigrading(inst).in_lambda_minus(delta))
        self.assertTrue(is_r_split(split))

    @PROFILE
    @given(seeds)
    def test_split_instances_have_zero_delta(self, seed):
        """Already split structures are fixed"""
        inst = random_instance(seed, split=True)
        delta, split = delta_splitting(inst)
        self.assertTrue(delta.is_zero())
        self.assertEqual(split.F, inst.F)

    @THOROUGH
    @given(seeds, seeds)
    def test_basis_change_invariance(self, seed, other):
        """δ(gF, gW) = g δ g⁻¹ for real g"""
        inst = random_instance(seed)
        g = real_unipotent(inst.dim, other)
        delta, _ = delta_splitting(inst)
        moved, _ = delta_splitting(inst.transport(g))
        self.assertEqual(moved, g @ delta @ g.inverse())


class TestScalingProperties(unittest.TestCase):
    """Hodge norms along y^{αY} for the real grading Y of the split point"""

    @SCALING
    @given(
        seeds,
        st.integers(min_value=0, max_value=63),
        st.sampled_from([4, 9, 100]),
        st.sampled_from([Fraction(1, 2), Fraction(-1, 2)]),
    )
    def test_scaling_law(self, seed, index, y, alpha):
        """‖y^{αY}v‖_{y^{αY}F} = y^{α(p+q)}‖v‖_F for v ∈ I^{p,q}"""
        inst = random_instance(seed)
        (p, q), v = pick_hodge_vector(inst, index)
        expected = float(y) ** (float(alpha) * (p + q))
        ratio = scaling_ratio(inst, split_grading(inst), y, alpha, v)
        self.assertAlmostEqual(ratio / expected, 1.0, delta=RELATIVE)

    @TWIST
    @given(seeds)
    def test_twist_factor_linear_in_y(self, seed):
        """τ(t(y)F) = 1 + y(τ(F) − 1) on non-split structures"""
        inst = random_instance(seed)
        assume(not delta_splitting(inst)[0].is_zero())
        result = basic_bound(inst, split_grading(inst), [4, 25, 100])
        self.assertGreater(result["C"], 0.0)
        for record in result["records"]:
            self.assertAlmostEqual(
                record["tau"] / record["predicted"], 1.0, delta=RELATIVE
            )

    @TWIST
    @given(seeds, st.integers(min_value=0, max_value=63))
    def test_twist_bound_ratio(self, seed, index):
        """The twisted ratio matches ((y^{−1} + τ − 1)/τ)^{(p+q)/2}"""
        inst = random_instance(seed)
        assume(not delta_splitting(inst)[0].is_zero())
        _, v = pick_hodge_vector(inst, index)
        Y = split_grading(inst)
        for y in (4, 25, 100):
            measured, predicted = twist_bound_ratio(inst, Y, y, v)
            self.assertAlmostEqual(measured / predicted, 1.0, delta=RELATIVE)


class TestDistanceInvariance(unittest.TestCase):
    """d̃(gF, gF′) = d̃(F, F′) for real g preserving W"""

    def setUp(self):
        self.biext = load_instance_data(shipped("biext_static")).instance
        # e0 ↦ e0 + e3/2 在 Gr^W 上平凡，路径留在 M 中
        shear = Operator.identity(4) + Operator.unit(4, 3, 0).scale(Fraction(1, 2))
        self.target = self.biext.F.apply(shear)

    @TWIST
    @given(seeds, st.sampled_from(list(MetricMode)))
    def test_distance_invariant(self, seed, mode):
        """Lower unitriangular real g fixes W and moves both endpoints"""
        g = real_unipotent(4, seed).transpose()
        self.assertEqual(self.biext.W.apply(g), self.biext.W)
        before = distance_surrogate(self.biext, self.target, mode)
        after = distance_surrogate(self.biext.transport(g), self.target.apply(g), mode)
        self.assertGreater(before, 0.0)
        self.assertAlmostEqual(after, before, delta=1e-9 * before)


class TestDecayProperties(unittest.TestCase):
    """Γ(s) decay for random coefficients"""

    @PROFILE
    @given(seeds)
    def test_gamma_decays(self, seed):
        """Ad(e^{N(z)})Γ(s) → 0 along the imaginary axis"""
        spec, lnf = random_lnf_spec(seed)
        self.assertTrue(ad_gamma_decay(spec, lnf).passed)


if __name__ == '__main__':
    unittest.main()
