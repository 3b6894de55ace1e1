import numpy as np
import pytest

from compas_mepoly.environments import TRAJECTORY_HEADER
from compas_mepoly.environments import Region
from compas_mepoly.environments import SmoothWorld
from compas_mepoly.polynomials import PolyDistribution
from compas_mepoly.training import HISTOGRAM_HEADER
from compas_mepoly.training import PolyPolicy
from compas_mepoly.training import cluster_terminals
from compas_mepoly.training import evaluate
from compas_mepoly.training import terminal_histogram
from compas_mepoly.training import write_terminal_histogram
from compas_mepoly.utilities import read_csv_to_dictionary


@pytest.fixture(scope='module')
def policy():
    distribution = PolyDistribution.from_settings(dim=2, order=2, grid_size=12)
    return PolyPolicy.create(distribution, hidden_sizes=(8,), seed=0)


def test_uniform_policy_in_empty_world_times_out(policy):
    metrics = evaluate(policy, SmoothWorld(max_steps=6), episodes=20, rng=0)
    assert metrics['success_rate'] == 0.0
    assert metrics['cause_counts'] == {'goal': 0, 'death': 0, 'timeout': 20}
    assert metrics['goal_counts'] == []
    assert metrics['goals_reached'] == 0
    assert metrics['mean_return'] == 0.0
    assert metrics['terminal_positions'].shape == (20, 2)
    assert metrics['trajectories'] == []


def test_evaluation_is_deterministic(policy):
    world = SmoothWorld(goals=[(Region(0.1, -1.0, 1.0, 1.0), 1.0)], max_steps=20)
    first = evaluate(policy, world, episodes=15, rng=4, record=True)
    second = evaluate(policy, world, episodes=15, rng=4, record=True)
    assert first['mean_return'] == second['mean_return']
    assert np.array_equal(first['terminal_positions'], second['terminal_positions'])
    assert first['trajectories'] == second['trajectories']
    assert all(len(row) == len(TRAJECTORY_HEADER) for row in first['trajectories'])
    assert first['goal_counts'][0] == first['cause_counts']['goal']


def test_cluster_terminals():
    positions = [[0.0, 0.0], [0.1, 0.0], [0.25, 0.0], [-0.8, 0.8], [0.9, -0.9]]
    labels = cluster_terminals(positions)
    assert labels[0] == labels[1] == labels[2]
    assert len(set(labels.tolist())) == 3
    assert cluster_terminals([]).tolist() == []
    assert cluster_terminals([[0.3, 0.3]]).tolist() == [1]


def test_terminal_histogram(tmp_path):
    positions = [[-0.9, -0.9], [-0.95, -0.8], [0.9, 0.1]]
    rows = terminal_histogram(positions, bins=2)
    assert [row[4] for row in rows] == [2, 0, 0, 1]
    assert rows[0][:4] == [-1.0, 0.0, -1.0, 0.0]

    filepath = str(tmp_path / 'terminal-histogram.csv')
    write_terminal_histogram(filepath, positions, bins=4)
    columns = read_csv_to_dictionary(filepath)
    assert list(columns) == HISTOGRAM_HEADER
    assert sum(int(count) for count in columns['count']) == 3
