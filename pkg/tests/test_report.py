import csv
import io
import json

from PIL import Image
from pytest import approx

from hdrelay.batch import process_sweep
from hdrelay.codec import SingleRelayCode
from hdrelay.pipeline import run_pipeline
from hdrelay.region import two_source_region_curves
from hdrelay.render import BACKGROUND, COLORS, HEIGHT, WIDTH, _scaler, render_region, save_region_png
from hdrelay.report import (
    build_capacity_table,
    build_counting_table,
    build_region_table,
    build_transcript_table,
    save_table,
    write_table,
)


def render(table, fmt):
    buf = io.StringIO()
    write_table(table, fmt, buf)
    return buf.getvalue()


def test_capacity_csv_uses_four_decimals():
    rows, summary = process_sweep([2], [2])
    text = render(build_capacity_table(rows, summary), "csv")
    lines = text.splitlines()
    assert lines[0] == "m,q,capacity,time_sharing_rate,capacity_infinite"
    record = next(csv.DictReader(io.StringIO(text)))
    assert record["capacity"] == f"{rows[0].capacity:.4f}"
    assert record["time_sharing_rate"] == "0.7925"
    assert record["capacity_infinite"] == "1.0000"


def test_capacity_json_keeps_full_precision():
    rows, summary = process_sweep([2, 3], [1])
    data = json.loads(render(build_capacity_table(rows, summary), "json"))
    assert data["summary"] == {"total": 2, "solved": 2, "failed": 0}
    assert data["rows"][0]["capacity"] == rows[0].capacity
    assert data["rows"][1]["profile"][-1] == 1.0


def test_empty_capacity_table_has_only_a_header():
    rows, summary = process_sweep([], [2])
    assert render(build_capacity_table(rows, summary), "csv") == "m,q,capacity,time_sharing_rate,capacity_infinite\n"


def test_region_table_marks_star_and_circle():
    table = build_region_table(two_source_region_curves(0.05))
    tags = [r["region_tag"] for r in table.rows]
    assert tags[-2:] == ["star", "circle"]
    assert {"cutset", "achievable", "achievable_point", "timing"} <= set(tags)
    assert tags.count("timing") > tags.count("achievable")
    point = next(r for r in table.rows if r["region_tag"] == "achievable_point")
    assert (point["R0"], point["R1"]) == ("0.000000", "1.584963")
    star = table.rows[-2]
    assert star["R0"] == "0.000000"
    assert float(star["R1"]) == approx(1.584963, abs=1e-6)


def test_transcript_is_written_as_json_lines():
    result = run_pipeline(SingleRelayCode(4, 1, 2), [1, 2, 4, 7])
    text = render(build_transcript_table(result), "json")
    records = [json.loads(line) for line in text.splitlines()]
    assert len(records) == 12
    assert records[0]["word"] == "001N"
    assert records[-1] == {"block": 4, "node": 2, "word": "NN0N", "decoded": {"w0": 4}}
    csv_text = render(build_transcript_table(result), "csv")
    assert "4,2,NN0N,w0=4" in csv_text.splitlines()


def test_counting_table_keeps_exact_sizes():
    huge = 3 ** 400
    table = build_counting_table([{"m": 2, "q": 2, "n": 512, "budgets": (150,), "max_w0": huge, "rate": 1.1}])
    assert table.rows[0]["max_w0"] == str(huge)
    data = json.loads(render(table, "json"))
    assert int(data[0]["max_w0"]) == huge
    assert data[0]["budgets"] == [150]


def test_saved_reports_are_reproducible(tmp_path):
    rows, summary = process_sweep([2, 3], [1, 2])
    table = build_capacity_table(rows, summary)
    first, second = tmp_path / "a" / "cap.csv", tmp_path / "b" / "cap.csv"
    save_table(table, "csv", first)
    save_table(build_capacity_table(*process_sweep([2, 3], [1, 2])), "csv", second)
    assert first.read_bytes() == second.read_bytes()


def test_region_png(tmp_path):
    path = tmp_path / "plots" / "region.png"
    save_region_png(two_source_region_curves(0.01), path)
    with Image.open(path) as img:
        assert img.format == "PNG"
        assert img.size == (WIDTH, HEIGHT)
        colors = {c for _, c in img.convert("RGB").getcolors(WIDTH * HEIGHT)}
    assert {COLORS["cutset"], COLORS["timing"], COLORS["achievable"]} <= colors


def test_rendered_region_marks_the_star():
    curves = two_source_region_curves(0.05)
    img = render_region(curves)
    assert img.size == (WIDTH, HEIGHT)
    x_max = max(p[0] for p in curves.cutset) * 1.1
    y_max = max(p[1] for p in curves.cutset) * 1.1
    star = _scaler(x_max, y_max)(curves.star)
    assert img.getpixel(tuple(round(v) for v in star)) == COLORS["achievable"]
    assert img.getpixel((WIDTH - 5, 5)) == BACKGROUND
