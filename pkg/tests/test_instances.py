import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gradedmassey.catalogue import KUMMER_GRID, NONZERO_P1
from gradedmassey.graded import random_module, random_stable_subgroup
from gradedmassey.instances import (DecomposeRequest, ModuleFile, ParseError, dump_decompose, dump_instance,
                                    dump_module, load_decompose, load_instance, load_module)
from gradedmassey.massey import SyntheticKummerInstance, UModule

SMALL = KUMMER_GRID[:3]


@pytest.mark.parametrize("spec", list(SMALL) + [NONZERO_P1], ids=lambda s: s.label)
def test_instance_round_trip(spec):
    inst = spec.build()
    text = dump_instance(inst)
    assert load_instance(text) == inst
    assert dump_instance(load_instance(text)) == text


def test_derived_blocks_written_for_small_models():
    text = dump_instance(KUMMER_GRID[1].build())
    assert "GROUP\n27\n" in text and "CHI" in text and "LAMBDA" in text
    assert "GROUP" not in dump_instance(KUMMER_GRID[1].build(), derived=False)


def test_improper_flag_round_trip():
    U = UModule.truncated_group_ring(3, 1, 1, 3)
    inst = SyntheticKummerInstance(3, 1, 1, 2, U, np.array([1, 0, 0]), np.zeros(3, dtype=np.int64), auto_w=False)
    text = dump_instance(inst)
    assert "OMEGA\n1 0\n" in text and "GROUP" not in text
    back = load_instance(text)
    assert back == inst and not back.auto_w and not back.is_proper()


def test_module_round_trip():
    M = UModule.truncated_group_ring(3, 2, 2, 3)
    mf = ModuleFile(M, [np.array([0, 3, 0])])
    assert load_module(dump_module(mf)) == mf
    assert load_module(dump_module(ModuleFile(M))) == ModuleFile(M)


@settings(max_examples=25)
@given(st.integers(0, 2**32 - 1))
def test_random_module_round_trip(seed):
    rng = np.random.default_rng(seed)
    M = random_module(3, 2, rng, max_log=4)
    D = random_stable_subgroup(M, rng)
    mf = ModuleFile(M, [M.unembed(b) for b in D.basis])
    assert load_module(dump_module(mf)) == mf


def test_decompose_round_trip():
    req = DecomposeRequest(3, 2, 1, 1, 2, [np.array([1, 2, 0]), np.array([0, 0, 1])])
    text = dump_decompose(req)
    assert "3 1 1 : 1 2 0" in text
    assert load_decompose(text) == req


def _error_line(loader, text):
    with pytest.raises(ParseError) as info:
        loader(text)
    return info.value.line


def test_parse_errors_carry_line_numbers():
    good = dump_instance(KUMMER_GRID[0].build(), derived=False)
    lines = good.splitlines()
    assert _error_line(load_instance, "\n".join(["BOGUS"] + lines)) == 1
    assert _error_line(load_instance, "1 2 3\n" + good) == 1
    bad = list(lines)
    bad[1] = "3 1 1"                                   # k missing
    assert _error_line(load_instance, "\n".join(bad)) == 2
    bad = list(lines)
    bad[bad.index("Y") + 1] = "1 x 0"
    assert _error_line(load_instance, "\n".join(bad)) == bad.index("Y") + 2
    bad = list(lines)
    bad[bad.index("OMEGA") + 1] = "1 5"
    assert _error_line(load_instance, "\n".join(bad)) == bad.index("OMEGA") + 1


def test_missing_block():
    good = dump_instance(KUMMER_GRID[0].build(), derived=False)
    lines = good.splitlines()
    i = lines.index("ZLIFT")
    text = "\n".join(lines[:i] + lines[i + 2:])
    with pytest.raises(ParseError, match="missing block ZLIFT"):
        load_instance(text)


def test_unreduced_entries_rejected():
    lines = dump_instance(KUMMER_GRID[0].build(), derived=False).splitlines()
    i = lines.index("Y")
    lines[i + 1] = " ".join(str(int(t) + 3) for t in lines[i + 1].split())
    with pytest.raises(ParseError, match="reduced"):
        load_instance("\n".join(lines))


def test_derived_mismatch_rejected():
    lines = dump_instance(KUMMER_GRID[0].build()).splitlines()
    i = lines.index("CHI")
    vals = lines[i + 1].split()
    vals[1] = str((int(vals[1]) + 1) % 3)
    lines[i + 1] = " ".join(vals)
    with pytest.raises(ParseError, match="CHI does not match") as info:
        load_instance("\n".join(lines))
    assert info.value.line == i + 1
    lines = dump_instance(KUMMER_GRID[0].build()).splitlines()
    j = lines.index("GROUP")
    lines[j + 2], lines[j + 3] = lines[j + 3], lines[j + 2]
    with pytest.raises(ParseError, match="multiplication table"):
        load_instance("\n".join(lines))


def test_module_parse_errors():
    with pytest.raises(ParseError, match="square"):
        load_module("PARAMS\n3 1 1\nUMODULE\n3 3\n1 0\n")
    with pytest.raises(ParseError):
        load_module("PARAMS\n3 1 1\nUMODULE\n3\n2\n")              # sigma^3 = 8 != 1
    with pytest.raises(ParseError, match="duplicate"):
        load_module("PARAMS\n3 1 1\nPARAMS\n3 1 1\n")


def test_decompose_parse_errors():
    with pytest.raises(ParseError, match="prefix") as info:
        load_decompose("PROJFORM\n3 2 1 1 2\nELEMENTS\n3 1 2 : 1 0 0\n")
    assert info.value.line == 4
    with pytest.raises(ParseError, match="coefficients"):
        load_decompose("PROJFORM\n3 2 1 1 2\nELEMENTS\n3 1 1 : 1 0\n")
    with pytest.raises(ParseError):
        load_decompose("PROJFORM\n3 2 1 1 9\n")


def test_trailing_comments_are_ignored():
    text = dump_instance(KUMMER_GRID[0].build(), derived=False)
    commented = "\n".join(line + "   # note" for line in text.splitlines()) + "\n# end\n"
    assert load_instance(commented) == load_instance(text)
