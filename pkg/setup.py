from setuptools import setup

setup(
    name="stability-calc",
    version="1.0",
    packages=["src", "src.core", "src.utils", "src.cli", "src.cli.commands"],
    install_requires=[
        "numpy",
        "sympy",
        "PyYAML"
    ],
    entry_points={
        "console_scripts": ["stability-calc=src.cli.main_command:main"],
    },
)
