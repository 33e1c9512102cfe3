def pytest_configure(config):
    config.addinivalue_line("markers", "slow: runs a shipped scenario end to end (deselect with -m 'not slow')")
