"""
Configuration test cases
Environment-driven settings and the float scalar field built from them
"""
import unittest

from asymptotic_hodge.config import Config
from asymptotic_hodge.linear_core import Subspace
from asymptotic_hodge.numeric import FLOAT, float_field


class TestFloatTolerance(unittest.TestCase):
    """FLOAT_TOLERANCE drives rank decisions of the float field"""

    def test_default_field_uses_config(self):
        """The module-level float field carries the configured tolerance"""
        self.assertEqual(FLOAT.tolerance, Config().FLOAT_TOLERANCE)
        self.assertFalse(FLOAT.exact)

    def test_explicit_tolerance(self):
        """An explicit tolerance overrides the configured one"""
        self.assertEqual(float_field(1e-6).tolerance, 1e-6)

    def test_tolerance_from_config_object(self):
        """A looser configured tolerance merges nearly parallel vectors"""
        config = Config(FLOAT_TOLERANCE=1e-4)
        rows = [[1.0, 0.0], [1.0, 1e-5]]
        self.assertEqual(Subspace(2, rows, float_field(config.FLOAT_TOLERANCE)).dim, 1)
        self.assertEqual(Subspace(2, rows, float_field(1e-9)).dim, 2)

    def test_scan_options_clamped(self):
        """Threads and Simpson panels have lower bounds"""
        options = Config(THREADS=0, SIMPSON_PANELS=10).get_scan_options()
        self.assertEqual(options["threads"], 1)
        self.assertEqual(options["panels"], 64)


if __name__ == '__main__':
    unittest.main()
