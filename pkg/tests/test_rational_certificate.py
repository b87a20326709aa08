from fractions import Fraction

import pytest

from dyndim.certificate import Certificate, jsonable
from dyndim.errors import InvariantError, ValidationError
from dyndim.rational import fmt_q, lcm_all, parse_q, q


def test_parse_and_format():
    assert parse_q("3/6") == Fraction(1, 2)
    assert parse_q(" -2 ") == Fraction(-2)
    assert fmt_q(Fraction(2)) == "2/1"
    assert fmt_q(Fraction(-1, 3)) == "-1/3"


@pytest.mark.parametrize("bad", ["1/0", "a/2", "1.5", ""])
def test_parse_rejects(bad):
    with pytest.raises(ValidationError):
        parse_q(bad)


def test_q_rejects_floats_and_bools():
    with pytest.raises(ValidationError):
        q(0.5)
    with pytest.raises(ValidationError):
        q(True)
    assert q(3) == 3 and q("1/4") == Fraction(1, 4)


def test_lcm_all():
    assert lcm_all([4, 6, 10]) == 60
    assert lcm_all([]) == 1


def test_certificate_roundtrip():
    c = Certificate("equality", "dim_X_T", Fraction(1, 2), {"points": {3, 1}, "v": Fraction(2, 3)}, True,
                    Fraction(1, 2), Fraction(1, 2))
    d = c.to_dict()
    assert d["value"] == "1/2" and d["witness"]["points"] == [1, 3] and d["witness"]["v"] == "2/3"
    back = Certificate.from_dict(d)
    assert back.value == c.value and back.interval() == (Fraction(1, 2), Fraction(1, 2))
    assert c.to_json() == back.to_json()
    assert c.passed


def test_failed_certificates_do_not_pass():
    assert not Certificate("fail", "x", verified=True).passed
    assert not Certificate("pass", "x", verified=False).passed


def test_jsonable_rejects_floats():
    with pytest.raises(InvariantError):
        jsonable({"a": 0.1})
