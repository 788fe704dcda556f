"""
Instance file test cases
Schema validation, exact parsing, canonical dumps and grid/point syntax
"""
import json
import shutil
import tempfile
import unittest
from fractions import Fraction
from pathlib import Path

from asymptotic_hodge.demos import SHIPPED_INSTANCES, shipped
from asymptotic_hodge.exceptions import FiltrationError, InstanceFormatError
from asymptotic_hodge.instance_io import (
    dump_loaded,
    load_instance,
    load_instance_data,
    parse_grid,
    parse_int_list,
    parse_point,
    parse_rational_list,
)
from asymptotic_hodge.linear_core import ExactComplex

INSTANCES = Path(__file__).resolve().parent.parent / "instances"


class TestLoading(unittest.TestCase):
    """Reading instance documents"""

    def setUp(self):
        self.tmp = Path(tempfile.mkdtemp())

    def tearDown(self):
        shutil.rmtree(self.tmp, ignore_errors=True)

    def test_shipped_files_match_generator(self):
        """instances/*.json agree with the in-package documents"""
        for name, doc in SHIPPED_INSTANCES.items():
            from_file = load_instance(INSTANCES / f"{name}.json")
            from_code = load_instance_data(doc)
            self.assertEqual(from_file.instance.W, from_code.instance.W, name)
            self.assertEqual(from_file.instance.F, from_code.instance.F, name)
            self.assertEqual(from_file.nilpotents, from_code.nilpotents, name)

    def test_optional_sections(self):
        """gamma, sl2 and biextension sections are parsed when present"""
        loaded = load_instance_data(shipped("biext"))
        self.assertEqual(loaded.gamma.rank, 1)
        self.assertEqual(len(loaded.require_sl2().H), 1)
        self.assertEqual(loaded.require_biextension().one, [1, 0, 0, 0])
        self.assertIsNone(load_instance_data(shipped("non_conv")).sl2)

    def test_missing_sections_raise(self):
        """Commands needing sl2 or biextension data fail cleanly"""
        loaded = load_instance_data(shipped("non_conv"))
        with self.assertRaises(InstanceFormatError):
            loaded.require_sl2()
        with self.assertRaises(InstanceFormatError):
            loaded.require_biextension()

    def test_hodge_numbers_default(self):
        """Missing Hodge numbers are read off (F, W)"""
        doc = shipped("biext_static")
        doc.pop("hodge_numbers")
        inst = load_instance_data(doc).instance
        expected = {(0, 0): 1, (0, -1): 1, (-1, 0): 1, (-1, -1): 1}
        self.assertEqual(inst.hodge_numbers, expected)

    def test_missing_file(self):
        """A nonexistent path is an input error"""
        with self.assertRaises(InstanceFormatError) as ctx:
            load_instance(self.tmp / "absent.json")
        self.assertEqual(ctx.exception.clause, "input")

    def test_invalid_json(self):
        """Broken JSON is an input error"""
        path = self.tmp / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        with self.assertRaises(InstanceFormatError) as ctx:
            load_instance(path)
        self.assertEqual(ctx.exception.clause, "json")


class TestSchema(unittest.TestCase):
    """Rejected documents"""

    def test_schema_version(self):
        """Only schema 1 is understood"""
        with self.assertRaises(InstanceFormatError):
            load_instance_data(shipped("weight_one", {"schema": 2}))

    def test_unknown_field(self):
        """Unknown top-level fields are rejected"""
        with self.assertRaises(InstanceFormatError):
            load_instance_data(shipped("weight_one", {"comment": "x"}))

    def test_float_scalar(self):
        """Scalars must be exact rational strings"""
        with self.assertRaises(InstanceFormatError) as ctx:
            doc = shipped("weight_one", {"nilpotents": [[[0.0, 0.0], [1.0, 0.0]]]})
            load_instance_data(doc)
        self.assertEqual(ctx.exception.clause, "scalar")

    def test_vector_length(self):
        """Vectors must have the stated dimension"""
        with self.assertRaises(InstanceFormatError):
            doc = shipped("weight_one", {"hodge_filtration": {"1": [["1"]]}})
            load_instance_data(doc)

    def test_gamma_rank(self):
        """Γ monomials need one exponent per variable"""
        with self.assertRaises(InstanceFormatError) as ctx:
            doc = shipped("weight_one", {"gamma": {"1,0": [["0", "0"], ["1", "0"]]}})
            load_instance_data(doc)
        self.assertEqual(ctx.exception.clause, "gamma_rank")

    def test_non_nested_filtration(self):
        """Filtration steps must be nested"""
        steps = {"0": [["1", "0"]], "1": [["0", "1"]]}
        doc = shipped("weight_one", {"weight_filtration": steps})
        with self.assertRaises(FiltrationError):
            load_instance_data(doc)


class TestDump(unittest.TestCase):
    """Canonical serialization"""

    def test_dump_reloads(self):
        """A dumped document loads back to the same data"""
        loaded = load_instance_data(shipped("biext"))
        data = json.loads(json.dumps(dump_loaded(loaded)))
        again = load_instance_data(data)
        self.assertEqual(again.instance.F, loaded.instance.F)
        self.assertEqual(again.instance.W, loaded.instance.W)
        self.assertEqual(again.instance.hodge_numbers, loaded.instance.hodge_numbers)
        self.assertEqual(again.gamma.terms, loaded.gamma.terms)
        self.assertEqual(again.sl2.Y0, loaded.sl2.Y0)


class TestGridSyntax(unittest.TestCase):
    """--grid, --point, --path and --x"""

    def test_log_spaced_axis(self):
        """y1=1:100:3 gives 1, 10, 100"""
        points = parse_grid("y1=1:100:3", 1)
        self.assertEqual([z[0].im for z in points], [1, 10, 100])

    def test_outside_region_dropped(self):
        """Only y1 ≥ y2 ≥ 1 survive"""
        points = parse_grid("y1=1:4:3,y2=1:4:3", 2)
        self.assertEqual(len(points), 6)
        self.assertTrue(all(z[0].im >= z[1].im for z in points))

    def test_real_parts(self):
        """x shifts every point"""
        points = parse_grid("y1=2:2:1", 1, x=[Fraction(1, 2)])
        self.assertEqual(points, [[ExactComplex(Fraction(1, 2), 2)]])

    def test_grid_errors(self):
        """Missing axes and bad syntax are rejected"""
        with self.assertRaises(InstanceFormatError):
            parse_grid("y1=1:4:3", 2)
        with self.assertRaises(InstanceFormatError):
            parse_grid("y1=1-4", 1)
        with self.assertRaises(InstanceFormatError):
            parse_grid("y1=0:4:3", 1)

    def test_point_and_lists(self):
        """Exact points and integer/rational lists"""
        expected = [ExactComplex(Fraction(1, 2), 3), ExactComplex(0, 2)]
        self.assertEqual(parse_point("1/2:3,0:2"), expected)
        self.assertEqual(parse_int_list("2,1"), [2, 1])
        self.assertEqual(parse_rational_list("1/2, 0"), [Fraction(1, 2), Fraction(0)])
        with self.assertRaises(InstanceFormatError):
            parse_point("abc")
        with self.assertRaises(InstanceFormatError):
            parse_int_list("a,b")


if __name__ == '__main__':
    unittest.main()
