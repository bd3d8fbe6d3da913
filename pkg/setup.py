
from setuptools import setup, find_namespace_packages

DEPENDENCIES = [
    "anthill-common>=0.2.5",
    "tornado>=5.0",
    "ujson>=4.0",
    "numpy>=1.17",
    "scipy>=1.3"
]

TEST_DEPENDENCIES = [
    "pytest>=7.0",
    "hypothesis>=6.0"
]

setup(
    name='anthill-normattain',
    version='0.1',
    description='Certified approximation of operators C(K) -> C(S) by norm-attaining operators',
    license='MIT',
    namespace_packages=["anthill"],
    packages=find_namespace_packages(include=["anthill.*"]),
    zip_safe=False,
    install_requires=DEPENDENCIES,
    extras_require={
        "test": TEST_DEPENDENCIES
    },
    entry_points={
        "console_scripts": [
            "normattain = anthill.normattain.console:main"
        ]
    }
)
