"""
From a noisy point cloud to labelled boxes
==========================================
"""

import numpy as np

from seqplan.perception import boxes_to_scene, cluster_points, density_shift, label_clusters

rng = np.random.default_rng(0)

# three cubes sampled on their surfaces, plus stray points
cubes = {"A": ((0.10, 0.30, 0.05), 0.10), "B": ((0.25, 0.30, 0.04), 0.08), "C": ((0.40, 0.30, 0.03), 0.06)}
pts, labels = [], []
for name, (center, side) in cubes.items():
    p = rng.uniform(-side / 2, side / 2, size=(400, 3))
    face = rng.integers(0, 3, size=400)
    p[np.arange(400), face] = np.sign(p[np.arange(400), face]) * side / 2
    pts.append(p + center)
    labels += [name] * 400
drift = rng.uniform([0, 0.2, 0], [0.5, 0.4, 0.1], size=(30, 3))
cloud = np.vstack(pts + [drift])
labels += ["noise"] * 30

shifted = density_shift(cloud, bandwidth=0.02)
clusters = cluster_points(shifted, radius=0.02, min_points=20)
print(len(clusters), "clusters")

boxes = label_clusters(shifted, labels, clusters)
scene = boxes_to_scene(boxes)
for o in scene.objects:
    print(o.name, np.round(o.size, 3), np.round(o.position, 3))
