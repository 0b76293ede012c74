"""Small helpers shared by test modules."""


def write_lines(tmp_path, lines, name="pairs.tsv"):
    path = tmp_path / name
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return str(path)


def perturbed(params, table, row, col, h):
    """Copy of params with one entry shifted by h."""
    out = params.copy()
    getattr(out, table)[row, col] += h
    out.touch()
    return out
