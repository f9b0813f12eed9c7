from hypothesis import settings

# solver-backed properties can be slow on first compile; keep runs reproducible
settings.register_profile("suite", deadline=None, derandomize=True)
settings.load_profile("suite")
