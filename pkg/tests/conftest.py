import hypothesis

hypothesis.settings.register_profile(
    "workbench",
    max_examples=25,
    deadline=None,
    derandomize=True,
)
hypothesis.settings.load_profile("workbench")
