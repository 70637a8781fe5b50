"""Unit tests for JSON loading, configuration and logging setup."""

import unittest
import sys
import os
import json
import logging
import tempfile
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from classes.base import InputFormatError, Side
from classes.domain import bitwise_table
from data.data_loader import (
    CONFIG_PATH,
    DATA_DIR as BUNDLED_DIR,
    DEFAULT_CONFIG,
    PROJECT_ROOT,
    DataProvider,
    configure_logging,
    load_config,
    load_function_table,
    load_partition,
    load_tensor,
    read_json,
)

DATA_DIR = os.path.join(os.path.dirname(__file__), '..', 'data')


class TestReadJson(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def write(self, name, text):
        path = os.path.join(self.tmp.name, name)
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        return path

    def test_syntax_error_names_line_and_column(self):
        """Test malformed JSON reports file, line and column."""
        path = self.write("bad.json", '{\n  "L": ["0",\n}\n')
        with self.assertRaises(InputFormatError) as ctx:
            read_json(path)
        message = str(ctx.exception)
        self.assertIn("bad.json", message)
        self.assertIn("line 3", message)
        self.assertIn("column", message)

    def test_missing_file(self):
        """Test a missing file is an input error."""
        with self.assertRaises(InputFormatError):
            read_json(os.path.join(self.tmp.name, "nope.json"))

    def test_tensor_side_is_checked(self):
        """Test that g must be declared over L."""
        f = load_function_table(os.path.join(DATA_DIR, "xor.json"))
        with self.assertRaises(InputFormatError) as ctx:
            load_tensor(os.path.join(DATA_DIR, "xor_h.json"), f, Side.L)
        self.assertIn("domain", str(ctx.exception))

    def test_fixtures_load(self):
        """Test the bundled fixtures."""
        f = load_function_table(os.path.join(DATA_DIR, "two_row_example.json"))
        self.assertEqual((f.size_l, f.size_r, f.size_t), (2, 12, 13))
        partition = load_partition(os.path.join(DATA_DIR, "two_row_example_partition.json"), f)
        self.assertEqual(partition.cost, 14)
        xor = load_function_table(os.path.join(DATA_DIR, "xor.json"))
        h = load_tensor(os.path.join(DATA_DIR, "xor_h.json"), xor, Side.R)
        self.assertEqual(h.values.tolist(), [0, 5, 0, -2])

    def test_bad_field_names_the_file(self):
        """Test a semantic error carries the file name."""
        path = self.write("f.json", json.dumps({"L": ["0"], "R": ["0"], "T": ["0"], "table": [["x"]]}))
        with self.assertRaises(InputFormatError) as ctx:
            load_function_table(path)
        self.assertIn("f.json", str(ctx.exception))
        self.assertIn("table[0][0]", str(ctx.exception))


class TestConfig(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def test_defaults_without_a_file(self):
        """Test the defaults when the file is absent."""
        config = load_config(os.path.join(self.tmp.name, "missing.json"))
        self.assertEqual(dict(config, log_file=DEFAULT_CONFIG["log_file"]), DEFAULT_CONFIG)
        self.assertEqual(config["log_file"], os.path.join(self.tmp.name, "fconv_log.txt"))

    def test_sections_and_flat_keys_merge(self):
        """Test nested sections and top-level keys both override defaults."""
        path = os.path.join(self.tmp.name, "config.json")
        with open(path, "w", encoding="utf-8") as f:
            json.dump({"engine_settings": {"jobs": 3, "unknown": 1}, "matmul_block": 16}, f)
        config = load_config(path)
        self.assertEqual(config["jobs"], 3)
        self.assertEqual(config["matmul_block"], 16)
        self.assertNotIn("unknown", config)
        self.assertEqual(config["pair_limit"], DEFAULT_CONFIG["pair_limit"])

    def test_bundled_config(self):
        """Test the shipped config.json."""
        config = load_config(os.path.join(DATA_DIR, "..", "config.json"))
        self.assertEqual(config["min_prime"], 2 ** 20)
        self.assertEqual(config["swap_policy"], "auto")

    def test_default_config_is_the_project_file(self):
        """Test that the default path does not depend on the working directory."""
        self.assertEqual(CONFIG_PATH, os.path.join(PROJECT_ROOT, "config.json"))
        self.assertTrue(os.path.exists(CONFIG_PATH))
        old = os.getcwd()
        os.chdir(self.tmp.name)
        self.addCleanup(os.chdir, old)
        config = load_config()
        self.assertEqual(config["log_file"], os.path.join(PROJECT_ROOT, "fconv_log.txt"))

    def test_log_file_next_to_the_config(self):
        """Test relative log files resolve against the config's directory, absolute ones stay."""
        path = os.path.join(self.tmp.name, "config.json")
        with open(path, "w", encoding="utf-8") as f:
            json.dump({"log_settings": {"log_file": "logs.txt"}}, f)
        self.assertEqual(load_config(path)["log_file"], os.path.join(self.tmp.name, "logs.txt"))
        absolute = os.path.join(self.tmp.name, "elsewhere", "run.log")
        with open(path, "w", encoding="utf-8") as f:
            json.dump({"log_file": absolute}, f)
        self.assertEqual(load_config(path)["log_file"], absolute)

    def test_logging_goes_to_the_file(self):
        """Test the file handler and its format."""
        config = dict(DEFAULT_CONFIG, log_file=os.path.join(self.tmp.name, "run.log"))
        root = configure_logging(config)
        logging.getLogger("fconv.test").info("hello")
        for handler in root.handlers:
            handler.flush()
        with open(config["log_file"], encoding="utf-8") as f:
            text = f.read()
        self.assertIn("INFO fconv.test | hello", text)
        configure_logging(dict(config, log_file=os.path.join(self.tmp.name, "other.log")))
        self.assertEqual(sum(1 for h in root.handlers if getattr(h, "_fconv", False)), 1)
        for handler in [h for h in root.handlers if getattr(h, "_fconv", False)]:
            root.removeHandler(handler)
            handler.close()


class TestDataProvider(unittest.TestCase):
    def test_creates_missing_fixtures(self):
        """Test that xor and and are written when absent."""
        with tempfile.TemporaryDirectory() as tmp:
            provider = DataProvider(tmp)
            self.assertEqual(provider.list_fixtures(), ["and", "xor"])
            self.assertEqual(provider.get_function("xor"), bitwise_table(2, "xor"))

    def test_paths_and_fixture_names(self):
        """Test that existing files win, then fixtures by name, then the name as given."""
        provider = DataProvider()
        self.assertEqual(provider.data_dir, BUNDLED_DIR)
        existing = os.path.join(DATA_DIR, "xor.json")
        self.assertEqual(provider.path(existing), existing)
        self.assertEqual(provider.path("xor_g"), os.path.join(BUNDLED_DIR, "xor_g.json"))
        self.assertEqual(provider.path("xor_g.json"), os.path.join(BUNDLED_DIR, "xor_g.json"))
        self.assertEqual(provider.path("no_such_fixture"), "no_such_fixture")

    def test_bundled_fixtures_by_name(self):
        """Test loading a function, tensors and a partition by fixture name."""
        provider = DataProvider()
        f = provider.get_function("two_row_example")
        self.assertEqual(provider.get_partition("two_row_example_partition", f).cost, 14)
        xor = provider.get_function("xor")
        self.assertEqual(provider.get_tensor("xor_h", xor, Side.R).values.tolist(), [0, 5, 0, -2])
        with self.assertRaises(InputFormatError):
            provider.get_tensor("xor_h", xor, Side.L)
        with self.assertRaises(InputFormatError) as ctx:
            provider.get_function("no_such_fixture")
        self.assertIn("no_such_fixture: file not found", str(ctx.exception))


if __name__ == '__main__':
    unittest.main()
