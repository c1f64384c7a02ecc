import os
import shutil
import tempfile
import unittest

from vagreeks import runconfig
from vagreeks.runconfig import RunConfig, ConfigError, CASES
from vagreeks.greeks import ESTIMATORS, BUMP, MIXED, FORWARD
from vagreeks.vaproduct import write_mortality_table

CUSTOM_MODEL = dict(kappa_v="1.5", theta_v="0.05", sigma_v="0.2", v0="0.05",
                    kappa_r="0.3", theta_r="0.03", sigma_r="0.1", r0="0.02",
                    rho_sv="-0.5", rho_sr="-0.2", rho_vr="0.1")


class CasesTest(unittest.TestCase):

    def test_table_of_cases(self):
        expected = {
            "A": (2, 0.04, 0.15, 0.4, 0.04, 0.1, -0.7, -0.3, 0.2),
            "B": (1, 0.04, 0.3, 0.4, 0.04, 0.1, -0.7, -0.3, 0.2),
            "C": (2, 0.04, 0.15, 0.2, 0.04, 0.2, -0.7, -0.3, 0.2),
            "D": (1, 0.04, 0.3, 0.2, 0.04, 0.2, -0.7, -0.3, 0.2),
            "E": (1, 0.04, 0.3, 0.2, 0.04, 0.2, -0.9, -0.3, 0.2),
        }

        self.assertEqual(sorted(expected), sorted(CASES))
        for name, values in expected.items():
            params = CASES[name]
            self.assertEqual(values, (
                params.kappa_v, params.theta_v, params.sigma_v,
                params.kappa_r, params.theta_r, params.sigma_r,
                params.rho_sv, params.rho_sr, params.rho_vr))
            self.assertEqual(params.theta_v, params.v0)
            self.assertEqual(params.theta_r, params.r0)
            params.validate()


class ReadConfigFileTest(unittest.TestCase):

    def setUp(self):
        self.directory = tempfile.mkdtemp()
        self.path = os.path.join(self.directory, "run.cfg")

    def tearDown(self):
        shutil.rmtree(self.directory)

    def test_keys_comments_and_blanks(self):
        with open(self.path, "w") as config_file:
            config_file.write("# Case B, small run\ncase = B\n\n"
                              "outer=200   # outer paths\n"
                              "steps-per-year = 10\n")

        values = runconfig.read_config_file(self.path)

        self.assertEqual({"case": "B", "outer": "200", "steps-per-year": "10"},
                         values)

    def test_missing_equals_then_error(self):
        with open(self.path, "w") as config_file:
            config_file.write("case B\n")

        with self.assertRaises(ConfigError) as e:
            runconfig.read_config_file(self.path)

        self.assertIn(":1:", str(e.exception))

    def test_missing_file_then_error(self):
        with self.assertRaises(ConfigError):
            runconfig.read_config_file(os.path.join(self.directory, "none"))


class RunConfigInitTest(unittest.TestCase):

    def test_defaults(self):
        config = RunConfig()

        self.assertEqual("A", config.case)
        self.assertEqual(ESTIMATORS, config.estimators)
        self.assertEqual(36000, config.n_paths)
        self.assertEqual(10000, config.n_outer)
        self.assertEqual(10, config.n_inner)
        self.assertEqual(20, config.steps_per_year)
        self.assertEqual(0.005, config.bump)
        self.assertEqual("table", config.format)
        self.assertEqual(10000.0, config.s0)
        self.assertEqual(CASES["A"], config.model_params())

    def test_string_values_converted(self):
        config = RunConfig({"case": "c", "outer": "200", "inner": "4",
                            "steps_per_year": "10", "bump": "0.01",
                            "seed": "9", "jobs": "3", "bump-scheme": FORWARD,
                            "term": "20", "fund-charge": "0.02"})

        self.assertEqual("C", config.case)
        self.assertEqual(200, config.n_outer)
        self.assertEqual(4, config.n_inner)
        self.assertEqual(10, config.steps_per_year)
        self.assertEqual(0.01, config.bump)
        self.assertEqual(9, config.seed)
        self.assertEqual(3, config.n_jobs)
        self.assertEqual(FORWARD, config.bump_scheme)
        product = config.product()
        self.assertEqual(20, product.term)
        self.assertEqual(0.02, product.fund_charge)

    def test_none_values_skipped(self):
        config = RunConfig({"case": None, "outer": None})

        self.assertEqual("A", config.case)
        self.assertEqual(10000, config.n_outer)

    def test_unknown_key_then_error(self):
        with self.assertRaises(ConfigError):
            RunConfig({"paths_per_leg": "10"})

    def test_bad_number_then_error(self):
        with self.assertRaises(ConfigError):
            RunConfig({"outer": "many"})

    def test_unknown_case_then_error(self):
        with self.assertRaises(ConfigError):
            RunConfig({"case": "Z"})

    def test_zero_outer_then_error(self):
        with self.assertRaises(ConfigError):
            RunConfig({"outer": 0})

    def test_single_outer_then_error(self):
        with self.assertRaises(ConfigError):
            RunConfig({"outer": 1})

    def test_negative_bump_then_error(self):
        with self.assertRaises(ConfigError):
            RunConfig({"bump": -0.01})

    def test_hdf5_without_out_then_error(self):
        with self.assertRaises(ConfigError):
            RunConfig({"format": "hdf5"})

    def test_unknown_format_then_error(self):
        with self.assertRaises(ConfigError):
            RunConfig({"format": "xlsx"})

    def test_config_error_is_value_error(self):
        self.assertTrue(issubclass(ConfigError, ValueError))


class EstimatorSelectionTest(unittest.TestCase):

    def test_all(self):
        self.assertEqual(ESTIMATORS, RunConfig.parse_estimators("all"))

    def test_comma_list_with_alias(self):
        self.assertEqual((BUMP, MIXED),
                         RunConfig.parse_estimators("bump, mixed"))

    def test_list(self):
        self.assertEqual((BUMP,), RunConfig({"estimators": ["bump"]})
                         .estimators)

    def test_unknown_then_error(self):
        with self.assertRaises(ConfigError):
            RunConfig.parse_estimators("bump vega")

    def test_empty_then_error(self):
        with self.assertRaises(ConfigError):
            RunConfig.parse_estimators("")


class ModelSelectionTest(unittest.TestCase):

    def test_custom_case(self):
        values = dict(CUSTOM_MODEL, case="custom")

        params = RunConfig(values).model_params()

        self.assertEqual(1.5, params.kappa_v)
        self.assertEqual(0.02, params.r0)
        self.assertEqual(-0.5, params.rho_sv)

    def test_custom_case_missing_key_then_error(self):
        values = dict(CUSTOM_MODEL, case="custom")
        del values["rho_vr"]

        with self.assertRaises(ConfigError) as e:
            RunConfig(values)

        self.assertIn("rho_vr", str(e.exception))

    def test_case_and_params_then_error(self):
        with self.assertRaises(ConfigError):
            RunConfig(dict(CUSTOM_MODEL, case="A"))

    def test_invalid_custom_params_then_error(self):
        values = dict(CUSTOM_MODEL, case="CUSTOM", rho_sv="0.99",
                      rho_sr="-0.99", rho_vr="0.99")

        with self.assertRaises(ConfigError):
            RunConfig(values).model_params()


class ProductTest(unittest.TestCase):

    def setUp(self):
        self.directory = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.directory)

    def test_default_product(self):
        product = RunConfig().product()

        self.assertEqual(10000.0, product.premium)
        self.assertEqual(30, product.term)

    def test_mortality_file(self):
        path = os.path.join(self.directory, "q.txt")
        write_mortality_table(path, [0.5] * 30)

        product = RunConfig({"mortality": path}).product()

        self.assertEqual((0.5,) * 30, product.mortality)

    def test_missing_mortality_file_then_error(self):
        config = RunConfig({"mortality": os.path.join(self.directory, "q")})

        with self.assertRaises(ConfigError):
            config.product()

    def test_invalid_product_then_error(self):
        with self.assertRaises(ConfigError):
            RunConfig({"guarantee_charge": "0.5"}).product()
