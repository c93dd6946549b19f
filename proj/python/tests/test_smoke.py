from pathlib import Path

import pytest

import cnctrans

FIXTURES = Path(__file__).resolve().parents[2] / "tests" / "fixtures"


def fixture(name):
    return (FIXTURES / name).read_text()


def test_derived_grammar_starts_with_module():
    derived = cnctrans.derive_grammar(cnctrans.cnc_grammar())
    assert derived.startswith("grammar ")
    assert "ComponentDef_Pat" in derived
    assert "Module" in derived


def test_format_is_stable():
    once = cnctrans.format_model(fixture("remote_node.arc"))
    assert cnctrans.format_model(once) == once
    assert once.startswith("component RemoteNode {\n")


def test_monitoring_counts():
    result = cnctrans.transform(fixture("add_monitoring.mtr"), fixture("remote_node_system.arc"))
    assert result["statements"] == [("loop addPorts()", 2), ("loop addMonitor()", 1), ("loop connect()", 3)]
    assert result["changed"]
    assert len(result["trace"]) == 6
    again = cnctrans.transform(fixture("add_monitoring.mtr"), result["model"])
    assert again["total"] == 0
    assert not again["changed"]


def test_client_auth():
    result = cnctrans.transform(fixture("client_auth.mtr"), fixture("shop.arc"))
    assert result["total"] == 1
    assert "access order (employee);" in result["model"]
    assert cnctrans.match(fixture("client_auth.mtr"), fixture("shop_equal_trust.arc"), "accessPort") == []


def test_check_and_errors():
    assert any("warning" in d for d in cnctrans.check(fixture("remote_node.arc")))
    with pytest.raises(cnctrans.Error) as info:
        cnctrans.format_model("component {", model_name="bad.arc")
    assert info.value.args[0] == "syntax"
    assert "bad.arc:1:11" in info.value.args[1]
    with pytest.raises(cnctrans.Error) as capped:
        cnctrans.transform(fixture("self_feeding.mtr"), fixture("shop.arc"), max_apply=5)
    assert capped.value.args[0] == "cap-exceeded"
