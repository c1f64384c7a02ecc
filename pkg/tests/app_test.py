import os
import shutil
import tempfile
import unittest
from mock import MagicMock, patch

import numpy as np

from vagreeks import app
from vagreeks.runconfig import ConfigError, RunConfig
from vagreeks.resultwriter import read_csv

app_patch_path = "vagreeks.app"
RunConfig_patch_path = app_patch_path + ".RunConfig"
ScenarioGenerator_patch_path = app_patch_path + ".ScenarioGenerator"
BumpRunner_patch_path = app_patch_path + ".BumpRunner"
NestedRunner_patch_path = app_patch_path + ".NestedRunner"

SMALL_RUN = ["run", "--case", "A", "--outer", "2", "--inner", "1",
             "--paths", "2", "--steps-per-year", "2", "--seed", "5"]


def run_args(**kwargs):
    args = dict(command="run", config=None, log_level=None, case="B",
                estimators=None, paths=None, outer=None, inner=None,
                steps_per_year=None, bump=None, seed=None, out=None,
                format=None, jobs=None, block_size=None, mortality=None,
                s0=None)
    args.update(kwargs)
    return MagicMock(**args)


class ParseArgsTest(unittest.TestCase):

    def test_run_flags(self):
        args = app.parse_args(["run", "--case", "B", "--estimators", "bump",
                               "mixed", "--outer", "50", "--format", "csv",
                               "--out", "b.csv", "--jobs", "2"])

        self.assertEqual("run", args.command)
        self.assertEqual("B", args.case)
        self.assertEqual(["bump", "mixed"], args.estimators)
        self.assertEqual(50, args.outer)
        self.assertEqual("csv", args.format)
        self.assertEqual("b.csv", args.out)
        self.assertEqual(2, args.jobs)
        self.assertIsNone(args.paths)

    def test_validate_defaults(self):
        args = app.parse_args(["validate"])

        self.assertEqual("validate", args.command)
        self.assertEqual(10 ** 6, args.samples)
        self.assertEqual(0, args.seed)

    def test_global_log_level(self):
        args = app.parse_args(["-l", "1", "validate"])

        self.assertEqual(1, args.log_level)

    def test_no_command_then_exit(self):
        with self.assertRaises(SystemExit):
            app.parse_args([])

    def test_bad_format_then_exit(self):
        with self.assertRaises(SystemExit):
            app.parse_args(["run", "--format", "xlsx"])


class SettingsTest(unittest.TestCase):

    def setUp(self):
        self.directory = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.directory)

    def test_flags_override_config_file(self):
        path = os.path.join(self.directory, "run.cfg")
        with open(path, "w") as config_file:
            config_file.write("case = C\nouter = 300\ninner = 4\n")

        values = app._settings(run_args(config=path, case="D", seed=3))

        self.assertEqual("D", values["case"])
        self.assertEqual("300", values["outer"])
        self.assertEqual("4", values["inner"])
        self.assertEqual(3, values["seed"])
        self.assertNotIn("paths", values)


class RunCaseTest(unittest.TestCase):

    @patch(app_patch_path + ".report_variance_reduction")
    @patch(NestedRunner_patch_path)
    @patch(BumpRunner_patch_path)
    @patch(ScenarioGenerator_patch_path)
    def test_builds_both_set_ups(self, generator_mock, bump_mock, nested_mock,
                                 report_mock):
        config = RunConfig({"case": "B", "outer": 40, "inner": 3,
                            "paths": 90, "seed": 8, "jobs": 2,
                            "estimators": "bump mixed"})
        bump_mock.return_value.run.return_value = ["bump rows"]
        nested_mock.return_value.run.return_value = ["nested rows"]

        estimates = app.run_case(config)

        product = config.product()
        generator_mock.assert_called_once_with(
            config.model_params(), horizon=30, seed=8, steps_per_year=20,
            quadrature="left", scheme="log", log_level=2)
        bump_mock.assert_called_once_with(
            generator_mock.return_value, product, n_paths=90, bump=0.005,
            scheme="central", block_size=250, n_jobs=2, log_level=2)
        nested_mock.assert_called_once_with(
            generator_mock.return_value, product, n_outer=40, n_inner=3,
            block_size=250, n_jobs=2, log_level=2)
        bump_mock.return_value.run.assert_called_once_with(
            10000.0, ("bump", "mixed_pw_lr"))
        self.assertEqual(["bump rows", "nested rows"], estimates)
        report_mock.assert_called_once_with(estimates, app.logger)


class MainTest(unittest.TestCase):

    @patch(app_patch_path + ".report")
    @patch(app_patch_path + ".validate",
           return_value=[MagicMock(passed=True), MagicMock(passed=True)])
    @patch(app_patch_path + ".parse_args",
           return_value=MagicMock(command="validate", log_level=None,
                                  samples=100, seed=1))
    def test_validate_passes(self, parse_mock, validate_mock, report_mock):
        self.assertEqual(app.OK, app.main())

        validate_mock.assert_called_once_with(n_samples=100, seed=1)
        report_mock.assert_called_once_with(validate_mock.return_value)

    @patch(app_patch_path + ".report")
    @patch(app_patch_path + ".validate",
           return_value=[MagicMock(passed=True), MagicMock(passed=False)])
    @patch(app_patch_path + ".parse_args",
           return_value=MagicMock(command="validate", log_level=None))
    def test_validate_fails(self, *_):
        self.assertEqual(app.VALIDATION_FAILED, app.main())

    @patch(app_patch_path + ".validate", side_effect=ConfigError("no samples"))
    @patch(app_patch_path + ".parse_args",
           return_value=MagicMock(command="validate", log_level=None))
    def test_validate_config_error(self, *_):
        self.assertEqual(app.BAD_CONFIG, app.main())

    @patch(RunConfig_patch_path, side_effect=ConfigError("Unknown case"))
    @patch(app_patch_path + ".parse_args", return_value=run_args(case="Z"))
    def test_run_config_error(self, parse_mock, config_mock):
        self.assertEqual(app.BAD_CONFIG, app.main())

    @patch(RunConfig_patch_path, side_effect=ConfigError("Unknown case"))
    @patch(app_patch_path + ".parse_args", return_value=run_args(case="Z"))
    def test_default_log_level_before_config(self, parse_mock, config_mock):
        app.logger.setLevel(0)

        app.main()

        self.assertEqual(20, app.logger.level)

    @patch(RunConfig_patch_path, side_effect=ConfigError("Unknown case"))
    @patch(app_patch_path + ".parse_args",
           return_value=run_args(case="Z", log_level=1))
    def test_log_level_flag_before_config(self, parse_mock, config_mock):
        app.main()

        self.assertEqual(10, app.logger.level)
        app.logger.setLevel(20)

    @patch(app_patch_path + ".write_results")
    @patch(app_patch_path + ".run_case")
    @patch(RunConfig_patch_path)
    @patch(app_patch_path + ".parse_args", return_value=run_args())
    def test_run(self, parse_mock, config_mock, run_mock, write_mock):
        config_mock.return_value.log_level = 2

        self.assertEqual(app.OK, app.main())

        config_mock.assert_called_once_with({"case": "B"})
        run_mock.assert_called_once_with(config_mock.return_value)
        write_mock.assert_called_once_with(config_mock.return_value,
                                           run_mock.return_value)

    def test_unknown_case_exit_code(self):
        self.assertEqual(app.BAD_CONFIG, app.main(["run", "--case", "Z"]))

    def test_missing_config_file_exit_code(self):
        self.assertEqual(app.BAD_CONFIG,
                         app.main(["run", "--config", "/no/such/file.cfg"]))


class EndToEndTest(unittest.TestCase):

    def setUp(self):
        self.directory = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.directory)

    def run_to_csv(self, name):
        path = os.path.join(self.directory, name)
        code = app.main(SMALL_RUN + ["--format", "csv", "--out", path])
        self.assertEqual(app.OK, code)
        return read_csv(path)

    def test_rows_and_determinism(self):
        first = self.run_to_csv("first.csv")
        second = self.run_to_csv("second.csv")

        self.assertEqual(
            [("bump", "liability"), ("bump", "delta"), ("bump", "gamma"),
             ("nested", "liability"), ("pathwise", "delta"), ("clrm", "delta"),
             ("clrm", "gamma"), ("mixed_pw_lr", "gamma")],
            list(zip(first["estimator"], first["order"])))
        self.assertEqual(["A"] * 8, list(first["case"]))
        self.assertEqual([5] * 8, list(first["seed"]))
        np.testing.assert_array_equal(first["value"], second["value"])
        np.testing.assert_array_equal(first["std_err"], second["std_err"])

    def test_hdf5_output(self):
        path = os.path.join(self.directory, "runs.h5")

        self.assertEqual(app.OK, app.main(
            SMALL_RUN + ["--estimators", "pathwise", "--format", "hdf5",
                         "--out", path]))
        self.assertEqual(app.BAD_CONFIG, app.main(
            SMALL_RUN + ["--estimators", "pathwise", "--format", "hdf5",
                         "--out", path]))
