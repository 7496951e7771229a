"""Legacy-format VTK export for visual inspection.

Writes ASCII STRUCTURED_POINTS files, one scalar field per file.  The
DIMENSIONS line carries the component's own staggered shape (ni, nj, nk) and
the value stream runs i fastest, matching how VTK walks x before y before z.
Values print with 9 significant digits, enough to round-trip f32 exactly.
"""

from __future__ import annotations

from .fields import FieldSet
from .params import COMPONENTS
from .errors import ValidationError


def vtk_text(fields: FieldSet, component: str, step: int = 0) -> str:
    if component not in COMPONENTS:
        raise ValidationError("unknown component %r" % (component,))
    arr = fields.component(component)
    p = fields.params
    ni, nj, nk = arr.shape
    scalar = "float" if p.precision == "f32" else "double"
    head = [
        "# vtk DataFile Version 3.0",
        "%s field, step %d" % (component, step),
        "ASCII",
        "DATASET STRUCTURED_POINTS",
        "DIMENSIONS %d %d %d" % (ni, nj, nk),
        "ORIGIN 0 0 0",
        "SPACING %.9g %.9g %.9g" % (p.dx, p.dy, p.dz),
        "POINT_DATA %d" % arr.size,
        "SCALARS %s %s 1" % (component, scalar),
        "LOOKUP_TABLE default",
    ]
    # i must vary fastest in the stream; memory layout has k fastest.
    stream = arr.transpose(2, 1, 0).ravel()
    body = "\n".join("%.9g" % v for v in stream)
    return "\n".join(head) + "\n" + body + "\n"


def export_vtk(fields: FieldSet, component: str, path: str, step: int = 0):
    """Write one component to path. IO errors propagate with the path."""
    text = vtk_text(fields, component, step)
    with open(path, "w") as f:
        f.write(text)
