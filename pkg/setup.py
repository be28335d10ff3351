from setuptools import setup, find_packages

setup(
name="c2lse",
version="1.0.0",
packages=find_packages(include=["app*"]),
py_modules=["main"],
include_package_data=True,
python_requires=">=3.11",
install_requires=[
    "numpy",
    "scipy",
    "scikit-learn>=1.3",
    "pydantic>=2",
    "click>=8.1",
    "python-dotenv",
    "tomli-w",
],
entry_points={"console_scripts": ["c2lse=main:run"]},
)
