"""Minimal ARFF reader.

Supports the subset used by algorithm-run tables: ``@relation``,
``@attribute`` with numeric, string or nominal types, a ``@data`` section of
comma-separated rows, and ``?`` for missing values. Sparse rows, weights and
date attributes are out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError


@dataclass(frozen=True)
class ArffTable:
    relation: str
    attributes: tuple[tuple[str, str], ...]  # (name, "numeric"|"string"|"nominal")
    rows: tuple[tuple, ...]  # values are float, str or None per attribute type

    def column(self, name: str) -> int:
        for idx, (attr, _) in enumerate(self.attributes):
            if attr.lower() == name.lower():
                return idx
        raise KeyError(name)


def _unquote(token: str) -> str:
    token = token.strip()
    if len(token) >= 2 and token[0] == token[-1] and token[0] in "'\"":
        return token[1:-1]
    return token


def _split_csv(line: str) -> list[str]:
    """Split a data row on commas, honouring single/double quotes."""
    parts = []
    buf = []
    quote = None
    for ch in line:
        if quote:
            if ch == quote:
                quote = None
            buf.append(ch)
        elif ch in "'\"":
            quote = ch
            buf.append(ch)
        elif ch == ",":
            parts.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
    parts.append("".join(buf))
    return parts


def load_arff(path) -> ArffTable:
    relation = ""
    attributes: list[tuple[str, str]] = []
    rows: list[tuple] = []
    in_data = False
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("%"):
                continue
            lower = line.lower()
            if not in_data:
                if lower.startswith("@relation"):
                    relation = _unquote(line[len("@relation"):])
                elif lower.startswith("@attribute"):
                    rest = line[len("@attribute"):].strip()
                    if rest.startswith(("'", '"')):
                        quote = rest[0]
                        end = rest.find(quote, 1)
                        if end < 0:
                            raise ParseError("unterminated attribute name", line=lineno)
                        name, type_part = rest[1:end], rest[end + 1:].strip()
                    else:
                        fields = rest.split(None, 1)
                        if len(fields) != 2:
                            raise ParseError("attribute missing a type", line=lineno)
                        name, type_part = fields
                    if type_part.startswith("{"):
                        kind = "nominal"
                    elif type_part.lower().split()[0] in ("numeric", "real", "integer"):
                        kind = "numeric"
                    elif type_part.lower().split()[0] == "string":
                        kind = "string"
                    else:
                        raise ParseError(
                            f"unsupported attribute type {type_part!r}", line=lineno
                        )
                    attributes.append((name, kind))
                elif lower.startswith("@data"):
                    if not attributes:
                        raise ParseError("@data before any @attribute", line=lineno)
                    in_data = True
                else:
                    raise ParseError(f"unrecognised header line {line!r}", line=lineno)
                continue
            tokens = _split_csv(line)
            if len(tokens) != len(attributes):
                raise ParseError(
                    f"expected {len(attributes)} fields, found {len(tokens)}",
                    line=lineno,
                )
            values = []
            for token, (name, kind) in zip(tokens, attributes):
                token = token.strip()
                if token == "?":
                    values.append(None)
                elif kind == "numeric":
                    try:
                        values.append(float(token))
                    except ValueError:
                        raise ParseError(
                            f"non-numeric value {token!r} for attribute {name!r}",
                            line=lineno,
                        ) from None
                else:
                    values.append(_unquote(token))
            rows.append(tuple(values))
    if not in_data:
        raise ParseError(f"{path}: no @data section found")
    return ArffTable(relation=relation, attributes=tuple(attributes), rows=tuple(rows))
