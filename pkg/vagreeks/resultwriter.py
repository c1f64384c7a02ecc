"""Write result rows as an aligned table, CSV or HDF5 groups."""

import os
import sys
import logging

import h5py as h5
import pandas as pd

COLUMNS = ["case", "estimator", "order", "value", "std_err", "n_outer",
           "n_inner", "seed", "runtime_s"]

TEXT_COLUMNS = ("case", "estimator", "order")


def estimates_to_frame(case, estimates):
    """Tabulate estimates for one case.

    Args:
        case(str): Case id
        estimates(list(GreekEstimate)): Estimates to tabulate

    Returns:
        pandas.DataFrame: One row per estimate with the COLUMNS header

    """
    rows = [dict(case=case, estimator=e.estimator, order=e.order,
                 value=e.value, std_err=e.std_err, n_outer=e.n_outer,
                 n_inner=e.n_inner, seed=e.seed, runtime_s=e.runtime)
            for e in estimates]
    return pd.DataFrame(rows, columns=COLUMNS)


class ResultWriter(object):

    """Base class for writing result tables."""

    # Default Values
    log_level = 2

    def __init__(self, output=None, log_level=None):
        """
        Args:
            output(str): Output file path, None for standard output
            log_level(int): Logging level (off=3, info=2, debug=1) -
                Default is info

        """
        self.logger = logging.getLogger(self.__class__.__name__)
        self.logger.setLevel(self.log_level * 10)
        if log_level is not None:
            self.logger.setLevel(log_level * 10)

        self.output = output

    def write(self, frame):
        """Write a result table.

        Args:
            frame(pandas.DataFrame): Rows to write

        """
        raise NotImplementedError("Must be implemented in child class")


class TableWriter(ResultWriter):

    """Human readable aligned table."""

    def write(self, frame):
        text = frame.to_string(index=False)
        if self.output is None:
            sys.stdout.write(text + "\n")
        else:
            with open(self.output, "w") as output:
                output.write(text + "\n")


class CSVWriter(ResultWriter):

    """CSV with the fixed result header."""

    def write(self, frame):
        if self.output is None:
            frame.to_csv(sys.stdout, index=False, columns=COLUMNS)
        else:
            frame.to_csv(self.output, index=False, columns=COLUMNS)
            self.logger.info("Wrote %s rows to %s", len(frame), self.output)


def read_csv(path):
    """Read rows written by CSVWriter, floats restored exactly."""
    return pd.read_csv(path, float_precision="round_trip")


class HDF5Writer(ResultWriter):

    """Store each run as a group of column datasets in an HDF5 file."""

    # Constants
    CREATE = "w"  # Will overwrite any existing file
    APPEND = "a"
    READ = "r"

    # Default Values
    target_node = "results"
    mode = CREATE

    def __init__(self, output, target_node=None, log_level=None):
        """
        Args:
            output(str): HDF5 file path
            target_node(str): Group to create for this run
            log_level(int): Logging level (off=3, info=2, debug=1) -
                Default is info

        """
        super(HDF5Writer, self).__init__(output, log_level)
        if output is None:
            raise ValueError("HDF5 output needs a file path")
        if target_node is not None:
            self.target_node = target_node

    def write(self, frame, attributes=None):
        """Write rows under the target node.

        Args:
            frame(pandas.DataFrame): Rows to write
            attributes(dict): Extra attributes for the run group

        """
        if os.path.isfile(self.output):
            with h5.File(self.output, self.READ) as results:
                node = results.get(self.target_node)
            if node is not None:
                raise IOError("{file} already has an entry for node "
                              "{node}".format(file=self.output,
                                              node=self.target_node))
            else:
                self.mode = self.APPEND

        self.logger.info("Writing results to %s:%s", self.output,
                         self.target_node)
        with h5.File(self.output, self.mode) as results:
            self.validate_node(results)
            group = results.create_group(self.target_node)
            for column in COLUMNS:
                values = frame[column].to_numpy()
                if column in TEXT_COLUMNS:
                    group.create_dataset(
                        column, data=values.astype(str).astype(object),
                        dtype=h5.string_dtype())
                else:
                    group.create_dataset(column, data=values)
            for key, value in (attributes or {}).items():
                group.attrs[key] = value

    def validate_node(self, results_file):
        """Create any parent group of the target node that doesn't exist.

        Args:
            results_file(h5py.File): File to check for node

        """
        while self.target_node.endswith("/"):
            self.target_node = self.target_node[:-1]

        if "/" in self.target_node:
            sub_group = self.target_node.rsplit("/", 1)[0]
            if sub_group and results_file.get(sub_group) is None:
                results_file.create_group(sub_group)


def read_hdf5(path, node):
    """Read a run group written by HDF5Writer back into a table."""
    with h5.File(path, "r") as results:
        group = results[node]
        data = {}
        for column in COLUMNS:
            values = group[column][()]
            if column in TEXT_COLUMNS:
                values = [value.decode() if isinstance(value, bytes)
                          else value for value in values]
            data[column] = values
    return pd.DataFrame(data, columns=COLUMNS)


def create_writer(output_format, output=None, target_node=None,
                  log_level=None):
    """Pick the writer for a format name."""
    if output_format == "table":
        return TableWriter(output, log_level)
    elif output_format == "csv":
        return CSVWriter(output, log_level)
    elif output_format == "hdf5":
        return HDF5Writer(output, target_node, log_level)
    raise ValueError("Unknown output format {}".format(output_format))
