import pytest

from evcoref.errors import ParseError
from evcoref.formats import (load_gazetteer, read_conll, read_gazetteer, read_partition_file,
                             read_partitions, write_conll, write_partitions)
from evcoref.metrics import Partition

from helpers import DATA

PARTS = {"t1": Partition([["m3", "m1"], ["m2"]]), "t2": Partition([["x", "y"]])}


def test_native_layout():
    assert write_partitions(PARTS) == "@topic t1\nm1 m3\nm2\n@topic t2\nx y\n"


def test_native_round_trip():
    assert read_partitions(write_partitions(PARTS)) == PARTS


def test_native_without_header():
    assert read_partitions("a b\nc\n# comment\n") == {"_": Partition([["a", "b"], ["c"]])}


def test_native_errors():
    with pytest.raises(ParseError):
        read_partitions("@topic\n")
    with pytest.raises(ParseError):
        read_partitions("a b\na\n")


def test_conll_layout():
    text = write_conll({"t1": PARTS["t1"]})
    assert text == ("#begin document (t1); part 000\n"
                    "t1\t0\tm1\t(0)\nt1\t0\tm2\t(1)\nt1\t0\tm3\t(0)\n#end document\n")


def test_conll_round_trip():
    assert read_conll(write_conll(PARTS)) == PARTS


def test_conll_dash_is_singleton():
    text = "#begin document (t); part 000\nt 0 a (1)\nt 0 b (1)\nt 0 c -\n#end document\n"
    assert read_conll(text) == {"t": Partition([["a", "b"], ["c"]])}


@pytest.mark.parametrize("text", [
    "t 0 a (1)\n",
    "#begin document (t); part 000\nt 0 a (1\n#end document\n",
    "#begin document (t); part 000\nt 0 a (1)\n",
    "#end document\n",
    "#begin document (t); part 000\n#begin document (u); part 000\n",
    "#begin document (t); part 000\nt a\n#end document\n",
])
def test_conll_errors(text):
    with pytest.raises(ParseError):
        read_conll(text)


def test_sniffing(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.conll"
    a.write_text(write_partitions(PARTS))
    b.write_text(write_conll(PARTS))
    assert read_partition_file(a) == read_partition_file(b) == PARTS


def test_gazetteer():
    gaz = read_gazetteer("# c\nManhattan > NYC > usa\nchicago > illinois > usa\n")
    assert [x.id for x in gaz["manhattan"]] == ["nyc", "usa"]
    assert [x.id for x in gaz["nyc"]] == ["usa"]
    assert "usa" not in gaz


def test_gazetteer_explicit_wins():
    gaz = read_gazetteer("a > b > c\nb > d\n")
    assert [x.id for x in gaz["b"]] == ["d"]


@pytest.mark.parametrize("text", ["a > b\na > c\n", "a > b > a\n", "a > > b\n"])
def test_gazetteer_errors(text):
    with pytest.raises(ParseError):
        read_gazetteer(text)


def test_shipped_gazetteer():
    gaz = load_gazetteer(DATA / "gazetteer.txt")
    assert [x.id for x in gaz["brooklyn"]] == ["nyc", "new_york_state", "usa"]
