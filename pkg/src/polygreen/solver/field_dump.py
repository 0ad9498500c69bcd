"""Flat binary dumps of grid fields and CSV slices of planar fields.

A dump starts with one ASCII header line
    polygreen-field dims=<d1>x<d2>[x<d3>] h=<h> low=<x,y[,z]> high=<x,y[,z]>
followed by the box values as little-endian 64 bit floats in row-major
order.
"""
import csv
from pathlib import Path

import numpy as np
from typeguard import typechecked

from polygreen.solver.grid import DiscreteField

MAGIC = "polygreen-field"


@typechecked
def _header(*, field: DiscreteField) -> str:
    grid = field.grid
    low = grid.h * grid.low_index
    high = low + grid.h * (np.array(grid.shape) - 1)
    return (
        f"{MAGIC} dims={'x'.join(str(s) for s in grid.shape)} "
        + f"h={grid.h:.17g} "
        + f"low={','.join(f'{v:.17g}' for v in low)} "
        + f"high={','.join(f'{v:.17g}' for v in high)}\n"
    )


@typechecked
def write_field_dump(*, field: DiscreteField, path: Path) -> Path:
    """Writes the field as header line plus row-major float64 payload."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as dump:
        dump.write(_header(field=field).encode("ascii"))
        dump.write(np.ascontiguousarray(field.values, dtype="<f8").tobytes())
    return path


@typechecked
def write_slice_csv(
    *, field: DiscreteField, path: Path, axis: int = 2, index: int = -1
) -> Path:
    """Writes a planar field, or one plane of a 3D field, as x,y,value rows.

    :param axis: Axis normal to the plane for 3D fields.
    :param index: Plane index along axis, -1 selects the plane through 0.
    """
    grid = field.grid
    coords = grid.coordinates()
    values = field.values
    if grid.n == 3:
        if index < 0:
            index = int(round(-grid.low_index[axis]))
        coords = np.take(coords, index, axis=axis)
        values = np.take(values, index, axis=axis)
        keep = [k for k in range(3) if k != axis]
        coords = coords[..., keep]
    elif grid.n != 2:
        raise ValueError(f"Error, cannot slice a {grid.n}-dimensional field.")
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["x", "y", "value"])
        for point, value in zip(
            coords.reshape(-1, 2), values.reshape(-1)
        ):
            writer.writerow(
                [f"{point[0]:.17g}", f"{point[1]:.17g}", f"{value:.17g}"]
            )
    return path
