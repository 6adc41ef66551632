import json
import math

import numpy as np
import pytest

from wheelbench.collision import CollisionModel, ValidityChecker
from wheelbench.env import (
    BUNDLED_SCENES,
    GridEnv,
    MapFormatError,
    PolygonEnv,
    Scenario,
    dump_polygon_env,
    gen_corridor_env,
    gen_density_env,
    load_bundled_scene,
    load_polygon_env,
    nearest_free_cell,
    parse_movingai_map,
    parse_movingai_scen,
    select_hardest,
)
from wheelbench.geom import Pose

from oracles import grid_bfs_reachable


def scen_text(rows):
    lines = ["version 1"]
    for sx, sy, gx, gy, length in rows:
        lines.append(f"0\tmap.map\t10\t10\t{sx}\t{sy}\t{gx}\t{gy}\t{length}")
    return "\n".join(lines) + "\n"


class TestParseMap:
    def test_minimal_map(self):
        env = parse_movingai_map("type octile\nheight 2\nwidth 2\nmap\n..\n.@\n")
        assert env.occupied_count() == 1
        assert env.is_cell_occupied(1, 1)
        assert not env.is_cell_occupied(0, 0)

    def test_all_free(self):
        env = parse_movingai_map("type octile\nheight 1\nwidth 3\nmap\n...\n")
        assert env.occupied_count() == 0

    def test_row_count_mismatch(self):
        with pytest.raises(MapFormatError):
            parse_movingai_map("type octile\nheight 2\nwidth 2\nmap\n..\n")

    def test_row_length_mismatch(self):
        with pytest.raises(MapFormatError):
            parse_movingai_map("type octile\nheight 2\nwidth 2\nmap\n..\n...\n")

    def test_missing_header(self):
        with pytest.raises(MapFormatError):
            parse_movingai_map("type octile\nwidth 2\nmap\n..\n..\n")

    def test_unknown_cell(self):
        with pytest.raises(MapFormatError):
            parse_movingai_map("type octile\nheight 1\nwidth 2\nmap\n.#\n")

    def test_water_is_free(self):
        env = parse_movingai_map("type octile\nheight 1\nwidth 3\nmap\n.WT\n")
        assert env.occupied_count() == 1

    def test_roundtrip(self):
        env = gen_density_env(3, 12, 9, 0.2)
        again = parse_movingai_map(env.to_text())
        assert np.array_equal(env.occupancy, again.occupancy)


class TestParseScen:
    def test_cell_center_convention(self):
        env = parse_movingai_map("type octile\nheight 2\nwidth 2\nmap\n..\n..\n")
        scens = parse_movingai_scen(scen_text([(0, 0, 1, 0, 1.0)]), env)
        assert len(scens) == 1
        assert scens[0].start == Pose(0.5, 0.5, 0)
        assert scens[0].goal == Pose(1.5, 0.5, 0)
        assert scens[0].optimal_2d_length == 1.0

    def test_empty_body(self):
        env = parse_movingai_map("type octile\nheight 1\nwidth 1\nmap\n.\n")
        assert parse_movingai_scen("version 1\n", env) == []

    def test_order_preserved(self):
        env = parse_movingai_map("type octile\nheight 1\nwidth 1\nmap\n.\n")
        scens = parse_movingai_scen(
            scen_text([(0, 0, 0, 0, 5.0), (0, 0, 0, 0, 2.0), (0, 0, 0, 0, 9.0)]), env
        )
        assert [s.optimal_2d_length for s in scens] == [5.0, 2.0, 9.0]

    def test_malformed_row_names_line(self):
        env = parse_movingai_map("type octile\nheight 1\nwidth 1\nmap\n.\n")
        with pytest.raises(MapFormatError, match="line 2"):
            parse_movingai_scen("version 1\n0\tm\t1\n", env)


class TestSelectHardest:
    def _scens(self, lengths):
        env = parse_movingai_map("type octile\nheight 1\nwidth 1\nmap\n.\n")
        return [
            Scenario(f"s{i}", env, Pose(0.5, 0.5, 0), Pose(0.5, 0.5, 0), l)
            for i, l in enumerate(lengths)
        ]

    def test_largest_selected(self):
        picked = select_hardest(self._scens([1, 9, 5]), 2)
        assert [s.optimal_2d_length for s in picked] == [9, 5]

    def test_n_larger_than_list(self):
        scens = self._scens([1, 2])
        assert select_hardest(scens, 10) == scens

    def test_last_50_of_sorted_51(self):
        scens = self._scens(list(range(51)))
        picked = select_hardest(scens, 50)
        assert len(picked) == 50
        assert picked == scens[1:]

    def test_partition_property(self):
        rng = np.random.default_rng(1)
        lengths = rng.uniform(0, 100, 30).tolist()
        scens = self._scens(lengths)
        picked = select_hardest(scens, 10)
        excluded = [s for s in scens if s not in picked]
        assert min(s.optimal_2d_length for s in picked) >= max(
            s.optimal_2d_length for s in excluded
        )


class TestCorridorGenerator:
    def test_deterministic(self):
        a = gen_corridor_env(7, 60, 60, 3, iterations=20)
        b = gen_corridor_env(7, 60, 60, 3, iterations=20)
        assert np.array_equal(a[0].occupancy, b[0].occupancy)
        assert a[1] == b[1] and a[2] == b[2]

    def test_wider_radius_more_free(self):
        narrow, _, _ = gen_corridor_env(5, 80, 80, 3, iterations=25)
        wide, _, _ = gen_corridor_env(5, 80, 80, 8, iterations=25)
        free_narrow = narrow.width * narrow.height - narrow.occupied_count()
        free_wide = wide.width * wide.height - wide.occupied_count()
        assert free_wide > free_narrow

    @pytest.mark.parametrize("seed", [1, 2, 3, 4])
    def test_start_goal_free_and_connected(self, seed):
        env, start, goal = gen_corridor_env(seed, 70, 70, 4, iterations=25)
        s = env.cell_of(start.x, start.y)
        g = env.cell_of(goal.x, goal.y)
        assert not env.is_cell_occupied(*s)
        assert not env.is_cell_occupied(*g)
        reachable = grid_bfs_reachable(np.asarray(env.occupancy), s)
        assert reachable[g[1], g[0]]

    def test_too_small_grid_rejected(self):
        with pytest.raises(ValueError):
            gen_corridor_env(1, 8, 8, 4, iterations=5)


class TestDensityGenerator:
    def test_zero_density(self):
        assert gen_density_env(1, 10, 10, 0.0).occupied_count() == 0

    def test_exact_count(self):
        assert gen_density_env(1, 100, 100, 0.02).occupied_count() == 200

    def test_deterministic(self):
        a = gen_density_env(9, 50, 40, 0.1)
        b = gen_density_env(9, 50, 40, 0.1)
        assert np.array_equal(a.occupancy, b.occupancy)

    def test_ratio_tolerance(self):
        env = gen_density_env(2, 33, 17, 0.137)
        total = env.width * env.height
        assert abs(env.occupied_count() / total - 0.137) <= 1.0 / total

    def test_invalid_density(self):
        with pytest.raises(ValueError):
            gen_density_env(0, 10, 10, 1.0)

    def test_nearest_free_cell(self):
        env = gen_density_env(4, 30, 30, 0.3)
        col, row = nearest_free_cell(env, 0, 0)
        assert not env.is_cell_occupied(col, row)


class TestPolygonEnvIO:
    def test_empty_obstacles(self):
        env, scens = load_polygon_env('{"bounds": [0, 0, 5, 5], "obstacles": []}')
        assert env.obstacles == ()
        assert scens == []

    def test_clockwise_fixed_or_rejected(self):
        doc = json.dumps(
            {"bounds": [0, 0, 5, 5], "obstacles": [[[0, 0], [0, 1], [1, 0]]]}
        )
        env, _ = load_polygon_env(doc)
        assert len(env.obstacles) == 1
        with pytest.raises(ValueError):
            load_polygon_env(doc, strict_orientation=True)

    def test_obstacle_outside_bounds(self):
        doc = json.dumps(
            {"bounds": [0, 0, 2, 2], "obstacles": [[[1, 1], [3, 1], [3, 3], [1, 3]]]}
        )
        with pytest.raises(ValueError):
            load_polygon_env(doc)

    def test_dump_load_roundtrip(self):
        env, scens = load_bundled_scene("parking3")
        text = dump_polygon_env(env, scens, name="parking3")
        env2, scens2 = load_polygon_env(text)
        assert env2.bounds == env.bounds
        assert [o.vertices for o in env2.obstacles] == [o.vertices for o in env.obstacles]
        assert [s.start for s in scens2] == [s.start for s in scens]

    @pytest.mark.parametrize("name", BUNDLED_SCENES)
    def test_bundled_scene_loads(self, name):
        env, scens = load_bundled_scene(name)
        assert len(scens) == 5

    def test_warehouse_poses_valid_for_bot(self):
        env, scens = load_bundled_scene("warehouse")
        checker = ValidityChecker(env, CollisionModel.warehouse_bot())
        for sc in scens:
            assert checker.is_state_valid(sc.start)
            assert checker.is_state_valid(sc.goal)

    @pytest.mark.parametrize("name", ["parking1", "parking2", "parking3"])
    def test_parking_poses_valid_for_car(self, name):
        env, scens = load_bundled_scene(name)
        checker = ValidityChecker(env, CollisionModel.car())
        for sc in scens:
            assert checker.is_state_valid(sc.start)
            assert checker.is_state_valid(sc.goal)


class TestGridJson:
    def test_roundtrip(self):
        env, start, goal = gen_corridor_env(11, 50, 50, 3, iterations=15)
        text = env.to_json(start=start, goal=goal, seed=11, params={"radius": 3})
        env2, start2, goal2 = GridEnv.from_json(text)
        assert np.array_equal(env.occupancy, env2.occupancy)
        assert start2 == start and goal2 == goal
