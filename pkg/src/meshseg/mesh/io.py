"""PLY (ascii / binary little-endian) and OFF (ascii) mesh readers/writers.

Vertex layout: x y z [red green blue] [nx ny nz] [label]. Byte color
channels are mapped to [0, 1] by /255. Binary PLY is written with double
precision so that save -> load round trips are bit exact.
"""

from __future__ import annotations

import os
from typing import Optional

import numpy as np

from .core import Mesh, check_mesh


class MeshParseError(ValueError):
    """Raised on malformed PLY/OFF input; message carries the offset."""


_PLY_DTYPES = {
    "char": "i1", "int8": "i1",
    "uchar": "u1", "uint8": "u1",
    "short": "i2", "int16": "i2",
    "ushort": "u2", "uint16": "u2",
    "int": "i4", "int32": "i4",
    "uint": "u4", "uint32": "u4",
    "float": "f4", "float32": "f4",
    "double": "f8", "float64": "f8",
}


def load_mesh(path, fmt: Optional[str] = None) -> Mesh:
    """Load and validate a mesh; fmt is inferred from the extension if omitted."""
    if fmt is None:
        fmt = os.path.splitext(str(path))[1].lstrip(".").lower()
    fmt = fmt.lower()
    if fmt == "ply":
        mesh = _load_ply(path)
    elif fmt == "off":
        mesh = _load_off(path)
    else:
        raise ValueError(f"unsupported mesh format: {fmt!r}")
    return check_mesh(mesh)


def save_mesh(mesh: Mesh, path, fmt: Optional[str] = None, binary: bool = True):
    if fmt is None:
        fmt = os.path.splitext(str(path))[1].lstrip(".").lower()
    fmt = fmt.lower()
    if fmt == "ply":
        _save_ply(mesh, path, binary=binary)
    elif fmt == "off":
        _save_off(mesh, path)
    else:
        raise ValueError(f"unsupported mesh format: {fmt!r}")


# ---------------------------------------------------------------- OFF

def _load_off(path) -> Mesh:
    with open(path, "r") as f:
        lines = [ln.strip() for ln in f]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or lines[0] != "OFF":
        raise MeshParseError(f"{path}: line 1: missing OFF header")
    try:
        nv, nf, _ = (int(t) for t in lines[1].split())
    except (ValueError, IndexError):
        raise MeshParseError(f"{path}: line 2: malformed count line")
    body = lines[2:]
    if len(body) < nv + nf:
        raise MeshParseError(f"{path}: truncated file, expected {nv + nf} body lines")
    positions = np.empty((nv, 3))
    for i in range(nv):
        parts = body[i].split()
        if len(parts) < 3:
            raise MeshParseError(f"{path}: vertex line {i}: expected 3 coordinates")
        positions[i] = [float(p) for p in parts[:3]]
    faces = np.empty((nf, 3), dtype=np.int64)
    for i in range(nf):
        parts = body[nv + i].split()
        if len(parts) < 4 or int(parts[0]) != 3:
            raise MeshParseError(f"{path}: face line {i}: only triangles supported")
        faces[i] = [int(p) for p in parts[1:4]]
    return Mesh(positions=positions, faces=faces)


def _save_off(mesh: Mesh, path):
    with open(path, "w") as f:
        f.write("OFF\n")
        f.write(f"{mesh.num_vertices} {mesh.num_faces} 0\n")
        for p in mesh.positions:
            f.write(f"{p[0]:.9g} {p[1]:.9g} {p[2]:.9g}\n")
        for face in mesh.faces:
            f.write(f"3 {face[0]} {face[1]} {face[2]}\n")


# ---------------------------------------------------------------- PLY

def _load_ply(path) -> Mesh:
    with open(path, "rb") as f:
        data = f.read()

    end_header = data.find(b"end_header")
    if end_header < 0:
        raise MeshParseError(f"{path}: missing end_header")
    header = data[:end_header].decode("ascii", errors="replace").splitlines()
    body_offset = data.find(b"\n", end_header) + 1

    if not header or header[0].strip() != "ply":
        raise MeshParseError(f"{path}: byte 0: missing ply magic")

    fmt = None
    elements = []  # (name, count, [(prop_name, dtype) or ('face_list', idx_dtype)])
    for lineno, raw in enumerate(header[1:], start=2):
        parts = raw.split()
        if not parts or parts[0] == "comment":
            continue
        if parts[0] == "format":
            fmt = parts[1]
            if fmt not in ("ascii", "binary_little_endian"):
                raise MeshParseError(
                    f"{path}: line {lineno}: unsupported format {fmt!r}"
                )
        elif parts[0] == "element":
            try:
                elements.append((parts[1], int(parts[2]), []))
            except (ValueError, IndexError):
                raise MeshParseError(f"{path}: line {lineno}: malformed element line")
        elif parts[0] == "property":
            if not elements:
                raise MeshParseError(f"{path}: line {lineno}: property before element")
            props = elements[-1][2]
            try:
                if parts[1] == "list":
                    props.append(("__list__", (_PLY_DTYPES[parts[2]], _PLY_DTYPES[parts[3]])))
                else:
                    props.append((parts[2], _PLY_DTYPES[parts[1]]))
            except (KeyError, IndexError):
                raise MeshParseError(f"{path}: line {lineno}: malformed property line")
    if fmt is None:
        raise MeshParseError(f"{path}: missing format line")

    parsed = {}
    if fmt == "ascii":
        tokens = data[body_offset:].decode("ascii").split()
        needed = sum(
            count * (4 if name == "face" else len(props))
            for name, count, props in elements
        )
        if len(tokens) < needed:
            raise MeshParseError(
                f"{path}: truncated body, expected {needed} values, got {len(tokens)}"
            )
        pos = 0
        for name, count, props in elements:
            if name == "vertex":
                rows = []
                for _ in range(count):
                    rows.append([float(tokens[pos + k]) for k in range(len(props))])
                    pos += len(props)
                parsed["vertex"] = (np.asarray(rows, dtype=np.float64), props)
            elif name == "face":
                faces = []
                for i in range(count):
                    n = int(tokens[pos]); pos += 1
                    if n != 3:
                        raise MeshParseError(f"{path}: face {i}: only triangles supported")
                    faces.append([int(tokens[pos + k]) for k in range(3)])
                    pos += 3
                parsed["face"] = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
            else:
                pos += count * max(1, len(props))
    else:
        offset = body_offset
        for name, count, props in elements:
            if name == "vertex":
                dtype = np.dtype([(p, "<" + d) for p, d in props])
                if len(data) - offset < dtype.itemsize * count:
                    raise MeshParseError(
                        f"{path}: byte {offset}: truncated vertex data"
                    )
                arr = np.frombuffer(data, dtype=dtype, count=count, offset=offset)
                offset += dtype.itemsize * count
                cols = np.stack(
                    [arr[p].astype(np.float64) for p, _ in props], axis=1
                )
                parsed["vertex"] = (cols, props)
            elif name == "face":
                if len(props) != 1 or props[0][0] != "__list__":
                    raise MeshParseError(f"{path}: unsupported face properties")
                cnt_dt, idx_dt = props[0][1]
                cnt_size = np.dtype(cnt_dt).itemsize
                idx_size = np.dtype(idx_dt).itemsize
                faces = np.empty((count, 3), dtype=np.int64)
                for i in range(count):
                    if len(data) - offset < cnt_size + 3 * idx_size:
                        raise MeshParseError(
                            f"{path}: byte {offset}: truncated face data"
                        )
                    n = int(np.frombuffer(data, dtype="<" + cnt_dt, count=1, offset=offset)[0])
                    offset += cnt_size
                    if n != 3:
                        raise MeshParseError(
                            f"{path}: byte {offset}: face {i}: only triangles supported"
                        )
                    faces[i] = np.frombuffer(data, dtype="<" + idx_dt, count=3, offset=offset)
                    offset += 3 * idx_size
                parsed["face"] = faces
            else:
                row = sum(np.dtype(d).itemsize for p, d in props if p != "__list__")
                offset += row * count

    if "vertex" not in parsed:
        raise MeshParseError(f"{path}: no vertex element")
    cols, props = parsed["vertex"]
    names = [p for p, _ in props]
    dtypes = dict(props)

    def take(keys):
        if all(k in names for k in keys):
            return cols[:, [names.index(k) for k in keys]]
        return None

    positions = take(["x", "y", "z"])
    if positions is None:
        raise MeshParseError(f"{path}: vertex element lacks x/y/z")
    colors = take(["red", "green", "blue"])
    if colors is not None and dtypes["red"] in ("u1", "i1"):
        colors = colors / 255.0
    normals = take(["nx", "ny", "nz"])
    labels = None
    if "label" in names:
        labels = cols[:, names.index("label")].astype(np.int64)
    faces = parsed.get("face", np.empty((0, 3), dtype=np.int64))
    return Mesh(positions=positions, faces=faces, colors=colors,
                normals=normals, labels=labels)


def _save_ply(mesh: Mesh, path, binary: bool = True):
    props = [("x", "f8"), ("y", "f8"), ("z", "f8")]
    columns = [mesh.positions]
    if mesh.colors is not None:
        props += [("red", "f8"), ("green", "f8"), ("blue", "f8")]
        columns.append(mesh.colors)
    if mesh.normals is not None:
        props += [("nx", "f8"), ("ny", "f8"), ("nz", "f8")]
        columns.append(mesh.normals)

    header = ["ply"]
    header.append("format binary_little_endian 1.0" if binary else "format ascii 1.0")
    header.append(f"element vertex {mesh.num_vertices}")
    ply_names = {"f8": "double", "i4": "int"}
    for name, dt in props:
        header.append(f"property {ply_names[dt]} {name}")
    if mesh.labels is not None:
        header.append("property int label")
    header.append(f"element face {mesh.num_faces}")
    header.append("property list uchar int vertex_indices")
    header.append("end_header")

    with open(path, "wb") as f:
        f.write(("\n".join(header) + "\n").encode("ascii"))
        if binary:
            dtype = [(name, "<" + dt) for name, dt in props]
            if mesh.labels is not None:
                dtype.append(("label", "<i4"))
            rec = np.empty(mesh.num_vertices, dtype=dtype)
            col = np.concatenate(columns, axis=1) if columns else None
            flat_names = [name for name, _ in props]
            for k, name in enumerate(flat_names):
                rec[name] = col[:, k]
            if mesh.labels is not None:
                rec["label"] = mesh.labels.astype(np.int32)
            f.write(rec.tobytes())
            face_rec = np.empty(
                mesh.num_faces, dtype=[("n", "u1"), ("idx", "<i4", (3,))]
            )
            face_rec["n"] = 3
            face_rec["idx"] = mesh.faces.astype(np.int32)
            f.write(face_rec.tobytes())
        else:
            col = np.concatenate(columns, axis=1)
            for i in range(mesh.num_vertices):
                row = " ".join(f"{v:.17g}" for v in col[i])
                if mesh.labels is not None:
                    row += f" {mesh.labels[i]}"
                f.write((row + "\n").encode("ascii"))
            for face in mesh.faces:
                f.write(f"3 {face[0]} {face[1]} {face[2]}\n".encode("ascii"))
