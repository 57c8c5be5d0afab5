# Core package: exact algebra, fixed points, cells, GKM graph, cohomology, oracles
