"""Rigid transforms between object, world, and camera frames.

Orientation convention: intrinsic yaw(Z) * pitch(Y) * roll(X), angles in
radians.  A pose maps its local frame into the world frame by rotation then
translation; the camera-frame mapping inverts the camera pose.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError


def rotation_matrix(orientation) -> np.ndarray:
    """3x3 rotation for (roll, pitch, yaw) = Rz(yaw) @ Ry(pitch) @ Rx(roll)."""
    roll, pitch, yaw = (float(a) for a in orientation)
    cr, sr = np.cos(roll), np.sin(roll)
    cp, sp = np.cos(pitch), np.sin(pitch)
    cy, sy = np.cos(yaw), np.sin(yaw)
    return np.array(
        [
            [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
            [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
            [-sp, cp * sr, cp * cr],
        ]
    )


def apply_pose(points: np.ndarray, pose) -> np.ndarray:
    """Map points (..., 3) from the pose's local frame to the world frame."""
    r = rotation_matrix(pose.orientation)
    return points @ r.T + np.asarray(pose.position, dtype=float)


def apply_pose_inverse(points: np.ndarray, pose) -> np.ndarray:
    """Map points (..., 3) from the world frame into the pose's local frame."""
    r = rotation_matrix(pose.orientation)
    return (points - np.asarray(pose.position, dtype=float)) @ r


def transform_to_camera(p, object_pose, camera_pose) -> np.ndarray:
    """Map a point from an object frame into the camera frame.

    Composition is object -> world -> camera; poses must be finite.
    """
    p = np.asarray(p, dtype=float)
    if not np.all(np.isfinite(p)):
        raise ValidationError("point must be finite")
    return apply_pose_inverse(apply_pose(p, object_pose), camera_pose)


def transform_from_camera(p_cam, object_pose, camera_pose) -> np.ndarray:
    """Inverse of transform_to_camera: camera -> world -> object frame."""
    p_cam = np.asarray(p_cam, dtype=float)
    if not np.all(np.isfinite(p_cam)):
        raise ValidationError("point must be finite")
    return apply_pose_inverse(apply_pose(p_cam, camera_pose), object_pose)
