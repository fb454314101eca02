import csv
import io
from typing import Any


class Table:
    """Plain aligned text table; output is byte-stable so it can be written as an artifact."""

    def __init__(self, title: str = ""):
        self.title = title
        self.columns: list[dict[str, str]] = []
        self.rows: list[list[str] | None] = []

    def add_column(self, name: str, justify: str = "left"):
        self.columns.append({"name": name, "justify": justify})

    def add_row(self, *args: Any):
        self.rows.append([str(a) for a in args])

    def add_section(self):
        # sections are a None row unless one is already pending
        if self.rows and self.rows[-1] is not None:
            self.rows.append(None)

    def _cell(self, value: str, width: int, justify: str) -> str:
        pad = " " * (width - len(value))
        return pad + value if justify == "right" else value + pad

    def __str__(self):
        widths = [len(c["name"]) for c in self.columns]
        for row in self.rows:
            if row is not None:
                for i, value in enumerate(row[: len(widths)]):
                    widths[i] = max(widths[i], len(value))

        rule = "-+-".join("-" * w for w in widths)
        lines = [self.title] if self.title else []
        lines.append(
            " | ".join(
                self._cell(c["name"], w, c["justify"])
                for c, w in zip(self.columns, widths, strict=True)
            ).rstrip()
        )
        lines.append(rule)
        for row in self.rows:
            if row is None:
                lines.append(rule)
                continue
            lines.append(
                " | ".join(
                    self._cell(v, w, c["justify"])
                    for v, c, w in zip(row, self.columns, widths, strict=False)
                ).rstrip()
            )
        return "\n".join(lines) + "\n"


def _is_numeric(value: Any) -> bool:
    if isinstance(value, (int, float)):
        return True
    try:
        float(value)
    except (TypeError, ValueError):
        return False
    return True


def render_text(rows: list[dict[str, Any]], title: str = "", footer_rows: int = 0) -> str:
    """
    Aligned text rendering of a list of flat dicts. Numeric columns are right
    justified; the last ``footer_rows`` rows are set off by a rule.
    """
    table = Table(title=title)
    if not rows:
        return str(table)
    headers = list(rows[0].keys())
    body = rows[: len(rows) - footer_rows] if footer_rows else rows
    for key in headers:
        numeric = all(_is_numeric(r[key]) for r in body if r[key] != "")
        table.add_column(key, justify="right" if numeric and body else "left")
    for i, row in enumerate(rows):
        if footer_rows and i == len(rows) - footer_rows:
            table.add_section()
        table.add_row(*(row[k] for k in headers))
    return str(table)


def render_csv(rows: list[dict[str, Any]], header: list[str] | None = None) -> str:
    output = io.StringIO()
    fieldnames = header or (list(rows[0].keys()) if rows else [])
    writer = csv.DictWriter(output, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: "" if v is None else str(v) for k, v in row.items()})
    return output.getvalue()
