"""Vulnerability catalogs: CSV and NVD JSON feed parsing, eligibility, game parameters."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Iterable, TextIO, Union

from .model import (
    AccessVector,
    Complexity,
    GameVulnerability,
    HoneypotProfile,
    VulnerabilityRecord,
)

CSV_HEADER = ("cve_id", "cvss_score", "access_vector", "access_complexity", "patch_available")

_BOOLS = {"true": True, "1": True, "false": False, "0": False}


class CatalogError(ValueError):
    """Malformed catalog input. ``row`` is the 1-based file line when known."""

    def __init__(self, message, row=None, column=None):
        where = ""
        if row is not None:
            where = f"row {row}"
            if column is not None:
                where += f", column {column!r}"
            where += ": "
        super().__init__(where + message)
        self.row = row
        self.column = column


@dataclass(frozen=True)
class Catalog:
    records: tuple[VulnerabilityRecord, ...]
    source: str = ""
    skipped: int = 0

    def __post_init__(self):
        seen = set()
        for rec in self.records:
            if rec.cve_id in seen:
                raise CatalogError(f"duplicate cve_id {rec.cve_id}")
            seen.add(rec.cve_id)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


def _text(source: Union[str, TextIO]) -> str:
    return source if isinstance(source, str) else source.read()


def parse_catalog_csv(source: Union[str, TextIO], name: str = "<csv>") -> Catalog:
    text = _text(source)
    if text.startswith("\ufeff"):
        text = text[1:]
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise CatalogError("missing header", row=1) from None
    if tuple(h.strip() for h in header) != CSV_HEADER:
        raise CatalogError(f"header must be {','.join(CSV_HEADER)}", row=1)

    records = []
    seen = {}
    for line_no, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(CSV_HEADER):
            raise CatalogError(f"expected {len(CSV_HEADER)} fields, got {len(row)}", row=line_no)
        cve_id, score, vector, complexity, patched = (cell.strip() for cell in row)
        if not cve_id:
            raise CatalogError("empty identifier", row=line_no, column="cve_id")
        if cve_id in seen:
            raise CatalogError(f"duplicate cve_id {cve_id} (first seen on row {seen[cve_id]})",
                               row=line_no, column="cve_id")
        try:
            score_value = float(score)
        except ValueError:
            raise CatalogError(f"not a number: {score!r}", row=line_no, column="cvss_score") from None
        if not 0.0 <= score_value <= 10.0:
            raise CatalogError(f"score {score_value} outside [0, 10]", row=line_no, column="cvss_score")
        try:
            access = AccessVector.parse(vector)
        except ValueError as exc:
            raise CatalogError(str(exc), row=line_no, column="access_vector") from None
        try:
            level = Complexity.parse(complexity)
        except ValueError as exc:
            raise CatalogError(str(exc), row=line_no, column="access_complexity") from None
        if patched.lower() not in _BOOLS:
            raise CatalogError(f"expected true/false/1/0, got {patched!r}", row=line_no,
                               column="patch_available")
        seen[cve_id] = line_no
        records.append(VulnerabilityRecord(cve_id, score_value, access, level, _BOOLS[patched.lower()]))
    return Catalog(tuple(records), source=name)


def write_catalog_csv(catalog: Iterable[VulnerabilityRecord], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in catalog:
        writer.writerow([
            rec.cve_id,
            repr(rec.cvss_score),
            rec.access_vector.value,
            rec.complexity.name,
            "true" if rec.patch_available else "false",
        ])


def catalog_to_csv(catalog: Iterable[VulnerabilityRecord]) -> str:
    buf = io.StringIO()
    write_catalog_csv(catalog, buf)
    return buf.getvalue()


_V3_COMPLEXITY = {"LOW": Complexity.LOW, "HIGH": Complexity.HIGH}


def _v2_record(cve_id, has_patch, metric):
    cvss = metric["cvssV2"]
    return VulnerabilityRecord(
        cve_id=cve_id,
        cvss_score=float(cvss["baseScore"]),
        access_vector=(AccessVector.REMOTE
                       if cvss["accessVector"].upper() in ("NETWORK", "ADJACENT_NETWORK")
                       else AccessVector.LOCAL),
        complexity=Complexity.parse(cvss["accessComplexity"]),
        patch_available=has_patch,
    )


def _v3_record(cve_id, has_patch, metric):
    cvss = metric["cvssV3"]
    return VulnerabilityRecord(
        cve_id=cve_id,
        cvss_score=float(cvss["baseScore"]),
        access_vector=(AccessVector.REMOTE
                       if cvss["attackVector"].upper() in ("NETWORK", "ADJACENT_NETWORK")
                       else AccessVector.LOCAL),
        complexity=_V3_COMPLEXITY[cvss["attackComplexity"].upper()],
        patch_available=has_patch,
    )


def parse_nvd_feed(source: Union[str, TextIO], name: str = "<nvd>") -> Catalog:
    """Read the 1.1 JSON feed subset. CVSS v2 wins; v3 is the fallback.

    Items with neither metric block are skipped and counted in
    ``Catalog.skipped``.
    """
    try:
        doc = json.loads(_text(source))
    except json.JSONDecodeError as exc:
        raise CatalogError(f"invalid JSON: {exc}") from None
    items = doc.get("CVE_Items") if isinstance(doc, dict) else None
    if not isinstance(items, list):
        raise CatalogError("feed has no CVE_Items list")

    records = []
    skipped = 0
    for pos, item in enumerate(items):
        try:
            cve = item["cve"]
            cve_id = cve["CVE_data_meta"]["ID"]
            refs = cve.get("references", {}).get("reference_data", [])
            has_patch = any(
                any("Patch" in tag for tag in ref.get("tags", []))
                for ref in refs
            )
            impact = item.get("impact", {}) or {}
            if "baseMetricV2" in impact:
                records.append(_v2_record(cve_id, has_patch, impact["baseMetricV2"]))
            elif "baseMetricV3" in impact:
                records.append(_v3_record(cve_id, has_patch, impact["baseMetricV3"]))
            else:
                skipped += 1
        except (KeyError, TypeError, AttributeError, ValueError) as exc:
            raise CatalogError(f"CVE_Items[{pos}] is malformed: {exc!r}") from None
    if not records:
        raise CatalogError(f"no usable items ({skipped} skipped)")
    return Catalog(tuple(records), source=name, skipped=skipped)


def filter_candidates(catalog: Iterable[VulnerabilityRecord],
                      profile: HoneypotProfile) -> list[VulnerabilityRecord]:
    """Remote, patchable records a honeypot of this profile can host, in order."""
    cap = profile.max_complexity.rank
    return [
        rec for rec in catalog
        if rec.access_vector is AccessVector.REMOTE
        and rec.patch_available
        and rec.complexity.rank <= cap
    ]


def derive_game_vulnerability(record: VulnerabilityRecord) -> GameVulnerability:
    """Exploit time and total switch cost both equal the complexity rank."""
    rank = float(record.complexity.rank)
    return GameVulnerability(record.cve_id, rank, rank / 2.0, rank / 2.0)


def game_vulnerabilities(records: Iterable[VulnerabilityRecord]) -> list[GameVulnerability]:
    return [derive_game_vulnerability(r) for r in records]
