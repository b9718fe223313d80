from setuptools import setup, find_packages

setup(
    name="metaestavel",
    version="1.0.0",
    packages=find_packages(exclude=["examples", "examples.*"]),
    install_requires=[
        "django>=4.0",
        "djangorestframework",
        "python-decouple",
        "PyYAML",
        "numpy",
        "scipy",
        "sympy",
        "mpmath",
    ],
    python_requires=">=3.10",
)
