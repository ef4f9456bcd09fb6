"""Shared pytest fixtures for the GDTL test suite."""

from pathlib import Path

import pytest

from gdtl import Context, GdtlConfig, parse_program
from gdtl.core import Atomic, CNat, CType
from gdtl.harness import base_context

PROGRAMS_DIR = Path(__file__).resolve().parent.parent / "programs"


HEAD = """
head : (A : Type 1) -> (n : Nat) -> Vec A (n + 1) -> A =
  fun A n v =>
    vecElim A (n + 1)
      (fun k w => natElim (fun _ => Type 1) Nat (fun j r => A) k)
      0
      (fun k h t r => h)
      v;
"""


@pytest.fixture
def programs_dir():
    """Directory holding the example programs with expected-outcome headers."""
    return PROGRAMS_DIR


@pytest.fixture
def head_source():
    """Source text declaring the length-indexed ``head``, without a main expression."""
    return HEAD


@pytest.fixture
def head_nil(head_source):
    """The resolved ``head Nat 0 ((Nil Nat) :: Vec Nat ?)`` program."""
    return parse_program(head_source + "head Nat 0 ((Nil Nat) :: Vec Nat ?)")


@pytest.fixture
def quick_config():
    """Small budgets for harness tests."""
    return GdtlConfig.quick()


@pytest.fixture
def poly_ctx():
    """``(A : Type 1) (a : A) (f : A -> A)``, the context programs are generated in."""
    return base_context()


@pytest.fixture
def nat_ctx():
    """``(n : Nat)``"""
    return Context().extend("n", CNat())


@pytest.fixture
def type_ctx():
    """``(A : Type 1) (x : A)``"""
    return Context().extend("A", CType(1)).extend("x", Atomic(0, (), "A"))
