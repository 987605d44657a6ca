//! The four-rooms gridworld with doorway options.
//!
//! The interior is `width x height` cells split by one vertical and one
//! horizontal wall, each pierced by two doorways. Actions are the four
//! compass moves; with probability `noise` a move fails and the agent
//! stays put. The goal cell is absorbing and pays 1 per stage.

use std::collections::VecDeque;

use super::{Environment, Scaffold};
use crate::model::{FhMdp, OptionSet, OptionSpec, RewardNoise};
use crate::{Error, Result};

pub const UP: usize = 0;
pub const RIGHT: usize = 1;
pub const DOWN: usize = 2;
pub const LEFT: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct FourRoomsParams {
    pub width: usize,
    pub height: usize,
    pub noise: f64,
    pub reward_noise: RewardNoise,
    /// Goal cell `(x, y)`; defaults to one cell in from the bottom-right corner.
    pub goal: Option<(usize, usize)>,
    /// Start cell `(x, y)`; defaults to the top-left corner.
    pub start: Option<(usize, usize)>,
    /// Horizon of the option-learning sub-problems.
    pub option_horizon: usize,
}

impl FourRoomsParams {
    pub fn new(width: usize, height: usize, noise: f64) -> Self {
        Self {
            width,
            height,
            noise,
            reward_noise: RewardNoise::Deterministic,
            goal: None,
            start: None,
            option_horizon: 12,
        }
    }
}

/// Cell layout of a four-rooms grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Layout {
    pub width: usize,
    pub height: usize,
    open: Vec<Option<usize>>,
    cells: Vec<(usize, usize)>,
    /// Room of every open cell (0 TL, 1 TR, 2 BL, 3 BR); doorways are `None`.
    room: Vec<Option<usize>>,
    /// Doorway cells, each with the two rooms it joins.
    pub doorways: Vec<(usize, [usize; 2])>,
}

impl Layout {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width < 5 || height < 5 {
            return Err(Error::InvalidParameter(format!(
                "four-rooms grid must be at least 5x5, got {width}x{height}"
            )));
        }
        let (wx, wy) = (width / 2, height / 2);
        let doors = [
            ((wx, wy / 2), [0, 1]),
            ((wx, wy + 1 + (height - wy - 1) / 2), [2, 3]),
            ((wx / 2, wy), [0, 2]),
            ((wx + 1 + (width - wx - 1) / 2, wy), [1, 3]),
        ];
        let mut open = vec![None; width * height];
        let mut cells = Vec::new();
        let mut room = Vec::new();
        let mut doorways = Vec::new();
        for y in 0..height {
            for x in 0..width {
                let door = doors.iter().find(|(c, _)| *c == (x, y));
                let on_wall = x == wx || y == wy;
                if on_wall && door.is_none() {
                    continue;
                }
                let id = cells.len();
                open[y * width + x] = Some(id);
                cells.push((x, y));
                match door {
                    Some((_, rooms)) => {
                        room.push(None);
                        doorways.push((id, *rooms));
                    }
                    None => room.push(Some(usize::from(x > wx) + 2 * usize::from(y > wy))),
                }
            }
        }
        Ok(Self {
            width,
            height,
            open,
            cells,
            room,
            doorways,
        })
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn state_at(&self, x: usize, y: usize) -> Option<usize> {
        (x < self.width && y < self.height).then(|| self.open[y * self.width + x]).flatten()
    }

    pub fn coords(&self, s: usize) -> (usize, usize) {
        self.cells[s]
    }

    pub fn room_of(&self, s: usize) -> Option<usize> {
        self.room[s]
    }

    /// Cell reached by moving from `s` in `dir`, or `s` when blocked.
    pub fn step(&self, s: usize, dir: usize) -> usize {
        let (x, y) = self.cells[s];
        let target = match dir {
            UP => y.checked_sub(1).map(|y| (x, y)),
            RIGHT => Some((x + 1, y)),
            DOWN => Some((x, y + 1)),
            LEFT => x.checked_sub(1).map(|x| (x, y)),
            _ => None,
        };
        target.and_then(|(x, y)| self.state_at(x, y)).unwrap_or(s)
    }

    /// Room cells plus the doorways bordering the room.
    pub fn domain(&self, room: usize) -> Vec<bool> {
        let mut d: Vec<bool> = self.room.iter().map(|r| *r == Some(room)).collect();
        for &(door, rooms) in &self.doorways {
            if rooms.contains(&room) {
                d[door] = true;
            }
        }
        d
    }

    /// Shortest-path action towards `target` inside `domain`, avoiding the
    /// `blocked` cell. Ties go to the lowest action id.
    pub fn shortest_path_policy(&self, domain: &[bool], target: usize, blocked: Option<usize>) -> Vec<Option<usize>> {
        let n = self.num_cells();
        let mut dist = vec![usize::MAX; n];
        dist[target] = 0;
        let mut queue = VecDeque::from([target]);
        while let Some(c) = queue.pop_front() {
            for dir in [UP, RIGHT, DOWN, LEFT] {
                let nb = self.step(c, dir);
                if nb == c || !domain[nb] || Some(nb) == blocked || dist[nb] != usize::MAX {
                    continue;
                }
                dist[nb] = dist[c] + 1;
                queue.push_back(nb);
            }
        }
        (0..n)
            .map(|s| {
                if !domain[s] || dist[s] == usize::MAX {
                    return None;
                }
                if s == target {
                    return Some(UP);
                }
                [UP, RIGHT, DOWN, LEFT]
                    .into_iter()
                    .find(|&dir| {
                        let nb = self.step(s, dir);
                        nb != s && domain[nb] && dist[nb].checked_add(1) == Some(dist[s])
                    })
            })
            .collect()
    }
}

pub fn make_four_rooms_env(params: &FourRoomsParams, horizon: usize) -> Result<Environment> {
    if !(0.0..1.0).contains(&params.noise) {
        return Err(Error::InvalidParameter(format!("four-rooms noise {} not in [0, 1)", params.noise)));
    }
    let layout = Layout::new(params.width, params.height)?;
    let cell = |(x, y): (usize, usize), what: &str| {
        layout
            .state_at(x, y)
            .ok_or_else(|| Error::InvalidParameter(format!("{what} ({x}, {y}) is not an open cell")))
    };
    let goal = cell(params.goal.unwrap_or((params.width - 2, params.height - 2)), "goal")?;
    let start = cell(params.start.unwrap_or((0, 0)), "start")?;
    let goal_room = layout
        .room_of(goal)
        .ok_or_else(|| Error::InvalidParameter("goal must lie inside a room, not in a doorway".into()))?;

    let n = layout.num_cells();
    let noise = params.noise;
    let mdp = FhMdp::stationary(
        n,
        4,
        horizon,
        params.reward_noise,
        |s, a| {
            if s == goal {
                return vec![(goal, 1.0)];
            }
            vec![(layout.step(s, a), 1.0 - noise), (s, noise)]
        },
        |s, _| if s == goal { 1.0 } else { 0.0 },
    )?;

    let mut options = Vec::new();
    let mut scaffolds = Vec::new();
    for room in 0..4 {
        let domain = layout.domain(room);
        let doors: Vec<usize> = layout
            .doorways
            .iter()
            .filter(|(_, rooms)| rooms.contains(&room))
            .map(|(d, _)| *d)
            .collect();
        for &door in &doors {
            let policy = layout.shortest_path_policy(&domain, door, Some(goal));
            let (dx, dy) = layout.coords(door);
            let o = OptionSpec::stationary(
                format!("room{room}->door({dx},{dy})"),
                n,
                horizon,
                |s| domain[s] && s != door && policy[s].is_some(),
                |s| if s == door || !domain[s] { 1.0 } else { 0.0 },
                |s| policy[s],
            );
            scaffolds.push(scaffold_for(options.len(), &o, &domain, door, params.option_horizon));
            options.push(o);
        }
        if room == goal_room {
            let policy = layout.shortest_path_policy(&domain, goal, None);
            let o = OptionSpec::stationary(
                format!("room{room}->goal"),
                n,
                horizon,
                |s| domain[s] && policy[s].is_some(),
                |s| if domain[s] { 0.0 } else { 1.0 },
                |s| policy[s],
            );
            scaffolds.push(scaffold_for(options.len(), &o, &domain, goal, params.option_horizon));
            options.push(o);
        }
    }

    Ok(Environment {
        name: format!("four-rooms-{}x{}", params.width, params.height),
        mdp,
        options: OptionSet::new(options),
        start,
        scaffolds,
    })
}

fn scaffold_for(option: usize, o: &OptionSpec, domain: &[bool], target: usize, horizon: usize) -> Scaffold {
    let states: Vec<usize> = (0..domain.len()).filter(|&s| domain[s]).collect();
    Scaffold {
        option,
        starts: states.iter().copied().filter(|&s| o.is_initiable(s, 1) && s != target).collect(),
        states,
        actions: vec![UP, RIGHT, DOWN, LEFT],
        horizon,
        targets: vec![target],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{execute_option, flatten_to_smdp};
    use crate::rng::SimRng;

    #[test]
    fn eleven_by_eleven_has_104_cells() {
        let layout = Layout::new(11, 11).unwrap();
        // 121 cells minus two 11-cell walls sharing one cell, plus 4 doorways.
        assert_eq!(layout.num_cells(), 121 - 21 + 4);
        let env = make_four_rooms_env(&FourRoomsParams::new(11, 11, 0.0), 30).unwrap();
        assert_eq!(env.mdp.num_states(), 104);
    }

    #[test]
    fn doorway_option_reaches_its_doorway() {
        let env = make_four_rooms_env(&FourRoomsParams::new(11, 11, 0.0), 40).unwrap();
        let layout = Layout::new(11, 11).unwrap();
        let mut rng = SimRng::seed_from(0);
        for (i, sc) in env.scaffolds.iter().enumerate() {
            let o = &env.options.options[sc.option];
            let target = sc.targets[0];
            if layout.room_of(target).is_some() {
                continue; // goal option holds at the goal until the horizon
            }
            for &s in &sc.starts {
                let out = execute_option(&env.mdp, o, s, 1, &mut rng).unwrap();
                assert_eq!(out.next_state, target, "option {i} from {s}");
                assert!(out.next_stage < 40);
            }
        }
    }

    #[test]
    fn option_set_is_admissible() {
        for noise in [0.0, 0.2] {
            let env = make_four_rooms_env(&FourRoomsParams::new(11, 11, noise), 30).unwrap();
            let report = env.options.validate_from(&env.mdp, env.start);
            assert!(report.is_valid(), "{report}");
            let smdp = flatten_to_smdp(&env.mdp, &env.options).unwrap();
            assert!(smdp.validate_with(1e-10).is_valid());
        }
    }

    #[test]
    fn malformed_grids_rejected() {
        assert!(make_four_rooms_env(&FourRoomsParams::new(4, 11, 0.0), 30).is_err());
        let mut p = FourRoomsParams::new(11, 11, 0.0);
        p.goal = Some((5, 0));
        assert!(make_four_rooms_env(&p, 30).is_err());
        assert!(make_four_rooms_env(&FourRoomsParams::new(11, 11, 1.5), 30).is_err());
    }
}
