#!/usr/bin/env python3
"""
Report Generator for Qudit GME
==============================

Writes scan results, detection reports, optimizer optima and oracle
summaries to CSV, JSON and Excel files, and reads the CSV and JSON scan
formats back for round-trip checks.

CSV layout: header ``alpha,beta,crit,lhs,violated``, one row per grid cell
per criterion, in grid order.
"""

import csv
import io
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

from config import config
from models.scan import ScanResult
from utils.error_handler import UsageError, ValidationError

logger = logging.getLogger(__name__)

CSV_HEADER = ('alpha', 'beta', 'crit', 'lhs', 'violated')
FORMATS = ('csv', 'json', 'xlsx')

ScanRow = Tuple[float, float, str, float, bool]

# Global variables to store Excel imports
_openpyxl_available = False
_Workbook = None
_Font = None
_PatternFill = None
_get_column_letter = None


def check_excel_availability() -> bool:
    """Check if openpyxl is available and return availability status."""
    global _openpyxl_available, _Workbook, _Font, _PatternFill, _get_column_letter

    try:
        from openpyxl import Workbook
        from openpyxl.styles import Font, PatternFill
        from openpyxl.utils import get_column_letter

        _Workbook = Workbook
        _Font = Font
        _PatternFill = PatternFill
        _get_column_letter = get_column_letter
        _openpyxl_available = True
        logger.debug("openpyxl available - Excel export enabled")
        return True
    except ImportError as e:
        logger.warning(f"openpyxl import failed: {e}. Excel export disabled.")
        _openpyxl_available = False
        return False


# Check Excel availability at module load time
EXCEL_AVAILABLE = check_excel_availability()


def _format_float(value: float) -> str:
    return repr(float(value))


def scan_to_csv(result: ScanResult) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(CSV_HEADER)
    for alpha, beta, crit, lhs, violated in result.rows():
        writer.writerow([_format_float(alpha), _format_float(beta), crit,
                         _format_float(lhs), 'true' if violated else 'false'])
    return buffer.getvalue()


def scan_to_json(result: ScanResult) -> str:
    return json.dumps(result.to_dict(), indent=2)


def read_scan_csv(text: str) -> List[ScanRow]:
    """Parse the CSV scan format back into flat rows."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if tuple(header or ()) != CSV_HEADER:
        raise ValidationError(f"unexpected CSV header {header}", ["header"])
    rows = []
    for line in reader:
        if not line:
            continue
        alpha, beta, crit, lhs, violated = line
        rows.append((float(alpha), float(beta), crit, float(lhs), violated == 'true'))
    return rows


def read_scan_json(text: str) -> List[ScanRow]:
    """Flatten the nested JSON scan format into the CSV row shape."""
    payload = json.loads(text)
    rows = []
    for cell in payload['cells']:
        for crit, record in cell['criteria'].items():
            rows.append((float(cell['alpha']), float(cell['beta']), crit,
                         float(record['lhs']), bool(record['violated'])))
    return rows


class ReportGenerator:
    """Writes results to the reports directory or to explicit paths."""

    def __init__(self, reports_dir: Optional[Union[str, Path]] = None):
        """
        Initialize the report generator.

        Args:
            reports_dir: Default directory for generated files
        """
        self.reports_dir = Path(reports_dir or config.REPORTS_DIR)

    def is_excel_available(self) -> bool:
        return _openpyxl_available

    def _target(self, out: Optional[Union[str, Path]], stem: str, fmt: str) -> Path:
        path = Path(out) if out else self.reports_dir / f"{stem}.{fmt}"
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def render_scan(self, result: ScanResult, fmt: str = 'csv') -> str:
        """Text rendering of a scan for stdout."""
        if fmt == 'csv':
            return scan_to_csv(result)
        if fmt == 'json':
            return scan_to_json(result)
        raise UsageError(f"format '{fmt}' cannot be written to stdout")

    def write_scan(self, result: ScanResult, out: Optional[Union[str, Path]] = None,
                   fmt: str = 'csv') -> Path:
        """
        Write a scan result.

        Args:
            result: Scan to write
            out: Target path; defaults to reports_dir/scan_<family>.<fmt>
            fmt: One of csv, json, xlsx

        Returns:
            Path: The written file
        """
        if fmt not in FORMATS:
            raise UsageError(f"unknown format '{fmt}', expected one of {FORMATS}")
        path = self._target(out, f"scan_{result.spec.family.family}", fmt)
        if fmt == 'xlsx':
            self._write_scan_xlsx(result, path)
        else:
            path.write_text(self.render_scan(result, fmt), encoding='utf-8')
        logger.info(f"Scan with {len(result)} cells written to {path}")
        return path

    def _write_scan_xlsx(self, result: ScanResult, path: Path) -> None:
        if not self.is_excel_available():
            raise UsageError("xlsx output needs openpyxl: pip install openpyxl")
        workbook = _Workbook()
        sheet = workbook.active
        sheet.title = 'Scan'
        sheet.append(list(CSV_HEADER))
        header_font = _Font(bold=True, color="FFFFFF")
        header_fill = _PatternFill(start_color="1976D2", end_color="1976D2", fill_type="solid")
        for column in range(1, len(CSV_HEADER) + 1):
            cell = sheet.cell(row=1, column=column)
            cell.font = header_font
            cell.fill = header_fill
            sheet.column_dimensions[_get_column_letter(column)].width = 14
        for alpha, beta, crit, lhs, violated in result.rows():
            sheet.append([alpha, beta, crit, lhs, bool(violated)])

        spec_sheet = workbook.create_sheet('Spec')
        for key, value in result.spec.to_dict().items():
            spec_sheet.append([key, json.dumps(value)])
        workbook.save(path)

    def write_json(self, payload: Union[Dict[str, Any], List[Any]], out: Optional[Union[str, Path]] = None,
                   stem: str = 'report') -> Path:
        """Write any JSON-serializable payload (reports, optima, oracle summaries)."""
        path = self._target(out, stem, 'json')
        path.write_text(json.dumps(payload, indent=2), encoding='utf-8')
        logger.info(f"Report written to {path}")
        return path


def reports_to_payload(reports: Iterable) -> List[Dict[str, Any]]:
    return [report.to_dict() for report in reports]
