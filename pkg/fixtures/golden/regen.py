"""Regenerate the report golden files from fixtures/golden/report.json.

Only run this after a deliberate change to the txt or html layout, and
review the diff before committing.
"""
from pathlib import Path

from accvv.report import load_report, render_html, render_txt

here = Path(__file__).parent
report = load_report(here / "report.json")
(here / "report.txt").write_text(render_txt(report), encoding="utf-8")
(here / "report.html").write_text(render_html(report), encoding="utf-8")
