import csv
import io
import json
import math

import numpy as np


class OutputManager:
    """Centralized envelope rendering"""

    NON_FINITE = {math.inf: "inf", -math.inf: "-inf"}

    @classmethod
    def sanitize(cls, value):
        """Plain JSON types; non-finite floats become strings"""
        if isinstance(value, dict):
            return {str(k): cls.sanitize(v) for k, v in value.items()}
        if isinstance(value, (list, tuple, np.ndarray)):
            return [cls.sanitize(v) for v in value]
        if isinstance(value, (bool, np.bool_)):
            return bool(value)
        if isinstance(value, (int, np.integer)):
            return int(value)
        if isinstance(value, (float, np.floating)):
            value = float(value)
            if math.isnan(value):
                return "nan"
            return cls.NON_FINITE.get(value, value)
        if isinstance(value, complex):
            return {"real": cls.sanitize(value.real), "imag": cls.sanitize(value.imag)}
        if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
            return value.value
        return value

    @classmethod
    def to_json(cls, envelope):
        return json.dumps(cls.sanitize(envelope.model_dump()), indent=2)

    @classmethod
    def to_csv(cls, envelope):
        """Scalars as key,value rows, arrays as columns, then the checks"""
        results = cls.sanitize(envelope.results)
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")

        columns = {k: v for k, v in results.items()
                   if isinstance(v, list) and not any(isinstance(x, (dict, list)) for x in v)}
        tables = {k: v for k, v in results.items()
                  if isinstance(v, list) and v and all(isinstance(x, dict) for x in v)}

        for key, value in results.items():
            if key in columns or key in tables:
                continue
            writer.writerow([key, json.dumps(value) if isinstance(value, (dict, list)) else value])

        if columns:
            writer.writerow(list(columns))
            height = max(len(v) for v in columns.values())
            for i in range(height):
                writer.writerow([v[i] if i < len(v) else "" for v in columns.values()])

        for name, rows in tables.items():
            header = list(rows[0])
            writer.writerow([name] + header)
            for row in rows:
                writer.writerow([""] + [row.get(h, "") for h in header])

        for check in cls.sanitize([c.model_dump() for c in envelope.checks]):
            writer.writerow(["check", check["name"], check["passed"], check["slack"]])
        return buffer.getvalue()

    @classmethod
    def render(cls, envelope, fmt="json"):
        if fmt == "csv":
            return cls.to_csv(envelope)
        return cls.to_json(envelope)
