import logging
from pathlib import Path

import pytest
from rich.logging import RichHandler

from tests._samples import FIXTURES_PATH, TMP_PATH
from vstrips.errors import ArgumentError
from vstrips.format import dump_yaml, format_value, render_rows, setup_logging


def setup_module():
    TMP_PATH.mkdir(exist_ok=True)


def test_dump_yaml():
    fixture_path = FIXTURES_PATH / "test_dump_yaml.yml"
    output_path = TMP_PATH / "test_dump_yaml.yml"
    with open(output_path, "w", encoding="utf-8") as f:
        dump_yaml(
            data={
                "report": {
                    "note": "variant\nreported only",
                    "s": [1, 2],
                },
            },
            stream=f,
        )
    with open(output_path, "r", encoding="utf-8") as f:
        actual = f.read()
    with open(fixture_path, "r", encoding="utf-8") as f:
        expected = f.read()
    assert actual == expected


def test_format_value():
    assert format_value(19 / 27) == "0.703704"
    assert format_value(19) == "19"
    assert format_value("P_C1") == "P_C1"
    assert format_value(1.1e-7) == "1.100000e-07"
    assert format_value(0.0) == "0.000000"


def test_render_rows_csv():
    text = render_rows(("quantity", "num", "den", "float"), [("P_C1", 19, 27, 19 / 27), ("H", "", "", 0.5)])
    assert text == "quantity,num,den,float\nP_C1,19,27,0.703704\nH,,,0.500000\n"


def test_render_rows_pads_and_md():
    text = render_rows(("a", "b", "c"), [(1,)], fmt="md")
    assert text == "| a | b | c |\n|---|---|---|\n| 1 |  |  |\n"
    with pytest.raises(ArgumentError):
        render_rows(("a",), [], fmt="yaml")


def test_setup_logging(tmp_path: Path):
    log_path = tmp_path / "logs" / "vstrips.log"
    setup_logging(logging.DEBUG, log_path)
    root = logging.getLogger()
    assert any(isinstance(h, RichHandler) for h in root.handlers)

    logging.getLogger("vstrips.test").warning("written to file")
    for handler in root.handlers:
        handler.flush()
    assert "written to file" in log_path.read_text(encoding="utf-8")

    setup_logging(logging.INFO)
    assert len(logging.getLogger().handlers) == 1
