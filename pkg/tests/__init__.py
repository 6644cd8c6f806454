"""Test package: shared oracles live in tests.oracles, fixtures in conftest."""
