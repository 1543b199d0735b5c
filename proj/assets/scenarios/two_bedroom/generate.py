#!/usr/bin/env python3
"""Regenerates the two_bedroom project manifests. Run from this directory."""
import json
import math

YAW_S = -math.pi / 2  # vertical frames face their standoff east

FRAME_BOX = [1.2, 0.1, 2.4]
PICK_POINT = [0.0, 0.0, 1.0]
TASK_ID = "t_frame_install"


def wall(eid, cx, cy, lx, ly):
    return {
        "id": eid, "name": eid, "category": "building",
        "pose": [cx, cy, 1.5, 0, 0, 0], "box": [lx, ly, 3.0],
        "linked_task_id": "t_shell",
    }


def frame(eid, x, y, yaw=0.0, augmented=True):
    e = {
        "id": eid, "name": eid, "category": "building",
        "pose": [x, y, 1.2, 0, 0, yaw], "box": FRAME_BOX,
        "linked_task_id": TASK_ID,
    }
    if augmented:
        e["local_points"] = {"pick_point": PICK_POINT}
    return e


def shell(doorway_half=0.45):
    """Exterior walls: building x in [7,17], y in [5,14], one south doorway at x=12."""
    lo, hi = 12 - doorway_half, 12 + doorway_half
    return [
        wall("wall_south_w", (6.925 + lo) / 2, 5.0, lo - 6.925, 0.15),
        wall("wall_south_e", (hi + 17.075) / 2, 5.0, 17.075 - hi, 0.15),
        wall("wall_north", 12.0, 14.0, 10.15, 0.15),
        wall("wall_west", 7.0, 9.5, 0.15, 9.15),
        wall("wall_east", 17.0, 9.5, 0.15, 9.15),
    ]


def storage(x, y):
    return {
        "id": "storage_1", "name": "frame_material_storage", "category": "storage",
        "pose": [x, y, 0.5, 0, 0, 0], "box": [2.0, 1.0, 1.0],
    }


def marker(x, y):
    return {
        "id": "pickup_1", "name": "pickup_location", "category": "zone_marker",
        "pose": [x, y, 0.02, 0, 0, 0], "box": [0.5, 0.5, 0.04],
    }


def toolbox(x, y):
    return {
        "id": "toolbox_1", "name": "site_toolbox", "category": "site_object",
        "pose": [x, y, 0.25, 0, 0, 0], "mesh": "meshes/toolbox.dae",
    }


def truck(x, y):
    return {
        "id": "truck_1", "name": "material_truck", "category": "site_object",
        "pose": [x, y, 1.0, 0, 0, 0], "box": [2.0, 1.0, 2.0],
    }


def frames_standard(augmented=True):
    ids = [f"frame_{i}" for i in range(11)]
    out = []
    # y=9 partition, west to east: five frames, 0.9 m doorway, two more frames.
    for i, x in enumerate([7.75, 8.95, 10.15, 11.35, 12.55]):
        out.append(frame(ids[i], x, 9.0, 0.0, augmented))
    out.append(frame(ids[5], 14.65, 9.0, 0.0, augmented))
    out.append(frame(ids[6], 15.85, 9.0, 0.0, augmented))
    # x=10.15 partition splitting the north half into two bedrooms.
    for k, y in enumerate([9.65, 10.85, 12.05, 13.25]):
        out.append(frame(ids[7 + k], 10.15, y, YAW_S, augmented))
    return out, ids


def frames_widened():
    ids = [f"frame_{i}" for i in range(9)]
    out = []
    for i, x in enumerate([7.75, 8.95, 10.15, 11.35, 12.55]):
        out.append(frame(ids[i], x, 9.0))
    out.append(frame(ids[5], 16.25, 9.0))  # 2.5 m interior gap at 13.15..15.65
    for k, y in enumerate([10.0, 11.2, 12.4]):
        out.append(frame(ids[6 + k], 10.15, y, YAW_S))
    return out, ids


def tasks(frame_ids, shell_ids):
    return [
        {
            "id": "t_shell", "name": "Erect building shell",
            "start_date": "2022-03-01", "finish_date": "2022-04-29",
            "robotization": False, "element_ids": shell_ids,
        },
        {
            "id": TASK_ID, "name": "Frame interior wood partition",
            "start_date": "2022-05-10", "finish_date": "2022-05-23",
            "robotization": True, "task_spec_id": "I-W-F-#1",
            "element_ids": frame_ids,
        },
    ]


SITE_PARAMS = {
    "allowable_robot_footprint_radius_max": 0.6,
    "allowable_robot_weight_max": 120.0,
    "nav_speed_min": 0.05,
    "nav_speed_max": 0.2,
    "prohibited_zones": [],
    "zone_speed_caps": {},
}


def manifest(elements, frame_ids, shell_ids):
    return {
        "schema_version": 1,
        "simulation_start_date": "2022-05-10",
        "site_params": SITE_PARAMS,
        "elements": elements,
        "tasks": tasks(frame_ids, shell_ids),
    }


def write(name, doc):
    with open(name, "w") as f:
        json.dump(doc, f, indent=2)
        f.write("\n")
    print(name)


def main():
    sh = shell()
    shell_ids = [e["id"] for e in sh]

    # Case 1: material storage outside, south-west of the building.
    fr, ids = frames_standard(augmented=True)
    els = sh + [storage(3.5, 3.0), marker(5.0, 3.9), toolbox(8.0, 2.0)] + fr
    write("project_case1.json", manifest(els, ids, shell_ids))

    # Un-augmented: no storage/marker, no pick points.
    fr, ids = frames_standard(augmented=False)
    els = sh + [toolbox(8.0, 2.0)] + fr
    write("project_unaugmented.json", manifest(els, ids, shell_ids))

    # Case 2: storage relocated inside the south room; truck keeps the grid
    # covering the outdoor area the workers use.
    fr, ids = frames_standard(augmented=True)
    els = sh + [storage(15.0, 6.5), marker(15.0, 7.7), truck(2.0, 2.0), toolbox(8.0, 2.0)] + fr
    write("project_case2.json", manifest(els, ids, shell_ids))

    # Widened: doorway and interior gap at 2.5 m; fewer frames so every
    # approach corridor stays wide.
    sh_w = shell(doorway_half=1.25)
    fr, ids = frames_widened()
    els = sh_w + [storage(3.5, 3.0), marker(5.0, 3.9), toolbox(8.0, 2.0)] + fr
    write("project_widened.json", manifest(els, ids, shell_ids))


if __name__ == "__main__":
    main()
