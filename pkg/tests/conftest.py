import os

from hypothesis import settings

# property tests run numerical solves; keep them deterministic and bounded
settings.register_profile("fraclab", max_examples=25, deadline=None, derandomize=True)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "fraclab"))
