import numpy as np
import pytest
from hypothesis import assume
from hypothesis import given
from hypothesis import strategies as st

from compas_mepoly.environments import LAYOUTS
from compas_mepoly.environments import TRAJECTORY_HEADER
from compas_mepoly.environments import Region
from compas_mepoly.environments import SmoothWorld
from compas_mepoly.environments import dump_layout
from compas_mepoly.environments import load_layout
from compas_mepoly.environments import load_named_layout
from compas_mepoly.environments import read_layout
from compas_mepoly.environments import world_step
from compas_mepoly.environments import write_trajectory_csv
from compas_mepoly.exceptions import LayoutError
from compas_mepoly.utilities import read_csv_to_dictionary

coordinate = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False)
velocity = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)


@pytest.fixture(scope='module')
def two_goals():
    return load_named_layout('two_goals')


@pytest.fixture
def corridor():
    return SmoothWorld(walls=[Region(-0.1, -1.0, 0.1, 1.0)], start=(-0.5, 0.0), dt=1.0, v_max=1.0)


def test_region_containment():
    region = Region(-0.5, -0.5, 0.5, 0.5)
    assert region.contains([0.5, 0.0])
    assert not region.contains_interior([0.5, 0.0])
    assert region.contains_interior([0.0, 0.0])
    with pytest.raises(ValueError):
        Region(0.5, 0.0, 0.4, 1.0)
    with pytest.raises(ValueError):
        Region(-1.5, 0.0, 0.0, 1.0)


def test_zero_action_keeps_state(two_goals):
    transition = world_step(two_goals, two_goals.start, [0.0, 0.0])
    assert transition.next_state.tolist() == two_goals.start.tolist()
    assert transition.reward == 0.0
    assert not transition.done
    assert transition.cause == 'none'


def test_entering_a_goal(two_goals):
    transition = world_step(two_goals, [-0.3, 0.0], [-1.0, 0.0])
    assert transition.next_state == pytest.approx([-0.4, 0.0])
    assert transition.reward == 1.0
    assert transition.done
    assert (transition.cause, transition.region) == ('goal', 0)


def test_entering_a_death_zone(two_goals):
    transition = world_step(two_goals, [0.0, -0.75], [0.0, -1.0])
    assert transition.reward == -1.0
    assert transition.done
    assert transition.cause == 'death'


def test_velocity_is_clamped(two_goals):
    transition = world_step(two_goals, [0.0, -0.2], [0.0, 5.0])
    assert transition.action.tolist() == [0.0, 1.0]
    assert transition.next_state == pytest.approx([0.0, -0.1])


def test_timeout_on_last_step():
    world = SmoothWorld(max_steps=3)
    assert world_step(world, [0.0, 0.0], [0.1, 0.0], t=1).cause == 'none'
    transition = world_step(world, [0.0, 0.0], [0.1, 0.0], t=2)
    assert transition.done
    assert (transition.cause, transition.reward) == ('timeout', 0.0)


def test_outer_box_stops_motion():
    world = SmoothWorld()
    transition = world_step(world, [0.95, 0.5], [1.0, 1.0])
    assert transition.next_state == pytest.approx([1.0, 0.55])


@pytest.mark.parametrize('action', [[1.0, 0.0], [1.0, 0.4], [0.9, -0.7]])
def test_wall_contact_matches_sampling_oracle(corridor, action):
    state = corridor.start
    transition = world_step(corridor, state, action)
    wall = corridor.walls[0]

    delta = np.asarray(action) * corridor.dt
    samples = state + np.linspace(0.0, 1.0, 1001)[:, np.newaxis] * delta
    first = next(i for i, point in enumerate(samples) if wall.contains(point))
    assert np.linalg.norm(transition.next_state - samples[first]) <= np.linalg.norm(delta) / 1000 + 1e-12
    assert transition.next_state[0] == -0.1
    assert not corridor.in_wall(transition.next_state)


def test_sliding_is_not_allowed(corridor):
    transition = world_step(corridor, [-0.1, 0.0], [1.0, 0.5])
    assert transition.next_state.tolist() == [-0.1, 0.0]


@given(x=coordinate, y=coordinate, vx=velocity, vy=velocity, layout=st.sampled_from(LAYOUTS))
def test_steps_stay_in_free_space(x, y, vx, vy, layout):
    world = load_named_layout(layout)
    assume(not world.in_wall([x, y]))
    transition = world_step(world, [x, y], [vx, vy])
    assert np.all(np.abs(transition.next_state) <= 1.0)
    assert not world.in_wall(transition.next_state)
    if transition.cause in ('none', 'timeout'):
        assert transition.reward == 0.0


@pytest.mark.slow
@pytest.mark.parametrize('layout', LAYOUTS)
def test_random_steps_stay_in_free_space(layout):
    world = load_named_layout(layout)
    rng = np.random.default_rng(0)
    states = rng.uniform(-1.0, 1.0, size=(100000, 2))
    actions = rng.uniform(-2.0, 2.0, size=(100000, 2))
    for state, action in zip(states, actions):
        if world.in_wall(state):
            continue
        transition = world_step(world, state, action)
        assert np.all(np.abs(transition.next_state) <= 1.0)
        assert not world.in_wall(transition.next_state)


def test_minimal_layout():
    world = load_layout('{"goals": [{"region": [0.5, 0.5, 1, 1]}]}')
    assert world.walls == []
    assert world.goals[0][1] == 1.0
    assert world.start.tolist() == [0.0, 0.0]
    assert (world.dt, world.v_max, world.max_steps) == (0.1, 1.0, 64)


@pytest.mark.parametrize('text, field', [
    ('{"walls": [[-0.5, -0.5, 0.5, 0.5]], "start": [0, 0]}', 'walls[0]'),
    ('{"speed": 1}', 'speed'),
    ('{"goals": [{"region": [0.5, 0.5, 0.4, 1]}]}', 'goals[0].region'),
    ('{"goals": [{"reward": 1}]}', 'goals[0]'),
    ('{"deaths": [{"region": [0.5, 0.5, 1, 1], "penalty": -1}]}', 'deaths[0].penalty'),
    ('{"deaths": [{"region": [-0.5, -0.5, 0.5, 0.5]}]}', 'deaths[0].region'),
    ('{"max_steps": 2.5}', 'max_steps'),
    ('{"dt": 0}', 'dt'),
    ('{"start": [0, 0, 0]}', 'start'),
])
def test_layout_field_errors(text, field):
    with pytest.raises(LayoutError) as info:
        load_layout(text)
    assert info.value.field == field


def test_layout_syntax_error_reports_line():
    with pytest.raises(LayoutError) as info:
        load_layout('{\n  "dt": 0.1,\n  "v_max": ,\n  "max_steps": 10\n}', source='broken.json')
    assert info.value.line == 3
    assert str(info.value).startswith('broken.json, line 3')


def test_read_layout_names_the_file(tmp_path):
    path = tmp_path / 'layout.json'
    path.write_text('{"dt": -1}')
    with pytest.raises(LayoutError) as info:
        read_layout(str(path))
    assert str(path) in str(info.value)
    assert info.value.field == 'dt'


@pytest.mark.parametrize('layout', LAYOUTS)
def test_shipped_layouts_round_trip(layout):
    world = load_named_layout(layout)
    assert world.name == layout
    assert world.goals
    again = load_layout(dump_layout(world))
    assert again == world
    assert again.name == layout


def test_world_data_round_trip(two_goals):
    assert SmoothWorld.from_data(two_goals.data) == two_goals


def test_trajectory_csv(tmp_path, two_goals):
    transition = world_step(two_goals, two_goals.start, [0.5, 0.0])
    row = [0, 0, transition.state[0], transition.state[1], transition.action[0], transition.action[1],
           transition.reward, transition.cause]
    filepath = str(tmp_path / 'trajectories.csv')
    write_trajectory_csv(filepath, [row])
    columns = read_csv_to_dictionary(filepath)
    assert list(columns) == TRAJECTORY_HEADER
    assert columns['cause'] == ['none']
    assert float(columns['vx'][0]) == 0.5
