from hypothesis import settings

settings.register_profile("exact", max_examples=50, derandomize=True, deadline=None)
settings.load_profile("exact")
