import io
import json

import pytest

from ctphan.amalgam import build_kappa, make_standard
from ctphan.cli import run
from ctphan.diagram import cycle


def call(*argv):
    out = io.StringIO()
    code, report = run(list(argv), out)
    return code, report, out.getvalue()


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def test_group_order():
    code, report, text = call("group", "order", "--type", "SL3", "--q", "2")
    assert code == 0 and text.strip() == "168"
    assert report["payload"]["order"] == 168


def test_group_order_enumerated_json():
    code, _, text = call("--json", "group", "order", "--type", "Sp4", "--q", "2", "--enumerate")
    obj = json.loads(text)
    assert code == 0 and obj["v"] == 1 and obj["payload"]["enumerated"] == 720


def test_budget_gate():
    code, report, _ = call("group", "order", "--type", "SL3", "--q", "9", "--enumerate")
    assert code == 2 and report["status"] == "budget"


def test_bad_q_is_malformed():
    code, report, _ = call("group", "order", "--type", "SL3", "--q", "6")
    assert code == 3 and report["status"] == "malformed"


def test_pair_verify_ct():
    code, report, text = call("--threads", "2", "pair", "verify", "--kind", "ct", "--type", "C2", "--q", "2")
    assert code == 0
    tags = [v["tag"] for v in report["payload"]["sides"][0]["verdicts"]]
    assert sorted(tags) == ["ExceptionalC2_2", "Parabolic(+)", "Parabolic(-)"]
    assert report["payload"]["sign_correlation"] == 0


def test_pair_verify_phan():
    code, report, _ = call("pair", "verify", "--kind", "phan", "--type", "A2", "--q", "2")
    assert code == 0 and report["payload"]["torus_uniqueness"]["holds"]


def test_amalgam_commands(tmp_path):
    d = cycle(2, ["A2"] * 4)
    a = write(tmp_path, "a.json", build_kappa(d, "ct", [(0, 1)]).to_json())
    b = write(tmp_path, "b.json", make_standard(d, "ct").to_json())
    code, report, text = call("amalgam", "check", a)
    assert code == 0 and report["payload"]["orientable"] is False
    code, report, _ = call("amalgam", "normalize", a)
    assert code == 0 and report["payload"]["kappa"]["edges"][0]["s"] == 1
    assert call("amalgam", "iso", a, a)[0] == 0
    code, report, text = call("amalgam", "iso", a, b)
    assert code == 1 and text.strip() == "distinct"


def test_classify(tmp_path):
    diag = dict(cycle(4, ["A2"] * 4).to_json(), v=1)
    p = write(tmp_path, "d.json", diag)
    code, report, text = call("amalgam", "classify", "--diagram", p, "--kind", "ct")
    assert code == 0 and report["payload"]["count"] == 4
    assert text.splitlines()[0] == "4 classes"


def test_classify_rejects_triangle(tmp_path):
    p = write(tmp_path, "t.json", dict(cycle(2, ["A2"] * 3).to_json(), v=1))
    code, report, _ = call("amalgam", "classify", "--diagram", p, "--kind", "ct")
    assert code == 1 and report["payload"]["violation"]["reason"] == "triangle"


@pytest.mark.parametrize("content", ["{", "[]", '{"kind": "ct"}', '{"v": 1, "kind": "xx", "diagram": {}}'])
def test_malformed_inputs(tmp_path, content):
    p = tmp_path / "bad.json"
    p.write_text(content)
    code, report, _ = call("amalgam", "check", str(p))
    assert code == 3


def test_missing_file_and_option():
    assert call("amalgam", "check", "/nonexistent.json")[0] == 3
    assert call("pair", "verify", "--kind", "ct")[0] == 3


def test_output_is_deterministic(tmp_path):
    p = write(tmp_path, "a.json", make_standard(cycle(2, ["A2"] * 4), "ct").to_json())
    assert call("--json", "amalgam", "normalize", p)[2] == call("--json", "amalgam", "normalize", p)[2]
