import os
import unittest
from unittest import mock

from toolkit.deltakit.core.config import Settings


class TestSettings(unittest.TestCase):
    def test_defaults(self) -> None:
        with mock.patch.dict(os.environ, {}, clear=True):
            settings = Settings.from_env()
        self.assertEqual(settings.max_degree, 4)
        self.assertEqual(settings.max_jet_order, 3)
        self.assertEqual(settings.battery_order, 3)
        self.assertEqual(settings.battery_degree, 2)
        self.assertTrue(settings.cache_enabled)

    def test_bounds_are_validated(self) -> None:
        with mock.patch.dict(os.environ, {"DELTAKIT_MAX_DEGREE": "0"}, clear=True):
            with self.assertRaisesRegex(ValueError, "DELTAKIT_MAX_DEGREE must be >= 1"):
                Settings.from_env()

    def test_invalid_bool(self) -> None:
        with mock.patch.dict(os.environ, {"DELTAKIT_CACHE_ENABLED": "maybe"}, clear=True):
            with self.assertRaisesRegex(ValueError, "Invalid boolean"):
                Settings.from_env()

    def test_log_level_must_be_known(self) -> None:
        with mock.patch.dict(os.environ, {"DELTAKIT_LOG_LEVEL": "chatty"}, clear=True):
            with self.assertRaises(ValueError):
                Settings.from_env()


if __name__ == "__main__":
    unittest.main()
