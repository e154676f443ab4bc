import json

import pytest

from src.core.errors import DuplicateEdgeError
from src.core.generators import full_palette_instance, star
from src.utils.data_loader import InstanceLoader, instance_from_dict, instance_to_dict, save_report
from src.utils.helpers import format_duration, select_items, summarize_checks, to_jsonable, write_table_csv


def test_instance_dict_format(uneven_lists):
    data = instance_to_dict(uneven_lists)
    assert data == {
        "n": 4,
        "q": 5,
        "edges": [[0, 1], [1, 2], [2, 3]],
        "lists": [[1, 2, 3], [1, 2, 3, 4], [2, 3, 4, 5], [1, 4, 5]],
    }
    assert instance_from_dict(data) == uneven_lists


def test_gen_report_envelope_is_accepted(star3_q7):
    envelope = {"command": "gen", "result": {"instance": instance_to_dict(star3_q7)}}
    assert instance_from_dict(envelope) == star3_q7


def test_list_count_must_match_n():
    with pytest.raises(ValueError):
        instance_from_dict({"n": 3, "q": 2, "edges": [], "lists": [[1], [2]]})
    with pytest.raises(DuplicateEdgeError):
        instance_from_dict({"q": 2, "edges": [[0, 1], [1, 0]], "lists": [[1, 2], [1, 2]]})


def test_load_json(tmp_path, star3_q7):
    path = tmp_path / "star.json"
    path.write_text(json.dumps(instance_to_dict(star3_q7)))
    loader = InstanceLoader()
    ok, message = loader.load(str(path))
    assert ok, message
    assert loader.instance == star3_q7
    summary = loader.get_instance_summary()
    assert summary["n"] == 4 and summary["glauber_valid"]
    assert summary["source"] == str(path)


@pytest.mark.parametrize(
    "content, fragment",
    [
        ("{not json", "Malformed JSON"),
        ("[1, 2]", "JSON object"),
        ('{"edges": []}', "Missing required keys"),
        ('{"q": 2, "edges": [[0, 0]], "lists": [[1], [1]]}', "Invalid instance"),
    ],
)
def test_load_json_failures(tmp_path, content, fragment):
    path = tmp_path / "bad.json"
    path.write_text(content)
    loader = InstanceLoader()
    ok, message = loader.load(str(path))
    assert not ok
    assert fragment in message
    assert loader.get_instance_summary() == {}


def test_missing_file(tmp_path):
    ok, message = InstanceLoader().load(str(tmp_path / "absent.json"))
    assert not ok and "File not found" in message


def test_load_edge_list(tmp_path):
    edges = tmp_path / "star.txt"
    edges.write_text("# center and three leaves\n0 1\n0 2\n0 3\n")
    loader = InstanceLoader()
    ok, message = loader.load(str(edges), q=7)
    assert ok, message
    assert loader.instance == full_palette_instance(star(3), 7)
    ok, message = InstanceLoader().load(str(edges))
    assert not ok and "--q" in message


def test_load_edge_list_with_lists(tmp_path):
    edges = tmp_path / "edge.txt"
    edges.write_text("0 1\n")
    lists = tmp_path / "lists.txt"
    lists.write_text("1 2 3\n2 3 4\n")
    loader = InstanceLoader()
    ok, message = loader.load_edge_list(str(edges), 4, lists_path=str(lists))
    assert ok, message
    assert loader.instance.lists == ((1, 2, 3), (2, 3, 4))


def test_save_report_creates_directories(tmp_path):
    target = tmp_path / "nested" / "report.json"
    ok, _ = save_report(str(target), "{}\n")
    assert ok
    assert target.read_text() == "{}\n"


def test_helpers(tmp_path):
    assert to_jsonable({"x": (1, 2), "inf": float("inf")}) == {"x": [1, 2], "inf": None}
    picked, sampled = select_items(list(range(10)), 4, seed=0)
    assert sampled and len(picked) == 4
    assert select_items(list(range(3)), 4, seed=0) == ([0, 1, 2], False)
    assert summarize_checks([True, False, True]) == "FAIL 1/3"
    assert summarize_checks([]) == "PASS 0/0"
    assert format_duration(90) == "1.5m"
    rows = [{"a": 1, "b": 2.5}, {"a": 2, "b": 3.5}]
    assert write_table_csv(rows, str(tmp_path / "t.csv")) == 2
    assert (tmp_path / "t.csv").read_text().splitlines()[0] == "a,b"
