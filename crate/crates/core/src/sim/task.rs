//! Task generation, fold bookkeeping, and on-disk formats.

use std::fs::File;
use std::io;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Task, Trajectory, Vec2};
use crate::rng::derive;

/// Geometry knobs for the task generator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TaskGenConfig {
    pub count: usize,
    pub train: usize,
    pub val: usize,
    pub test: usize,
    /// Cup left edge is drawn uniformly from this interval.
    pub cup_min_x: f64,
    pub cup_max_x: f64,
    pub cup_width: f64,
    pub wall_height: f64,
    pub launch_origin: (f64, f64),
    /// When set, tasks only score after a floor bounce outside the cup.
    pub require_bounce: bool,
}

impl Default for TaskGenConfig {
    fn default() -> Self {
        TaskGenConfig {
            count: 25,
            train: 15,
            val: 5,
            test: 5,
            cup_min_x: 2.0,
            cup_max_x: 8.0,
            cup_width: 0.6,
            wall_height: 0.4,
            launch_origin: (0.0, 1.0),
            require_bounce: false,
        }
    }
}

impl TaskGenConfig {
    /// The bank-shot variant: tall cups that can only be entered after a
    /// floor bounce, which makes low restitution unrecoverable.
    pub fn bank_shot_variant() -> Self {
        TaskGenConfig { wall_height: 1.2, require_bounce: true, ..Default::default() }
    }
}

/// A generated task collection with disjoint train/val/test folds.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSet {
    pub tasks: Vec<Task>,
    pub train: usize,
    pub val: usize,
    pub test: usize,
}

impl TaskSet {
    pub fn train_fold(&self) -> &[Task] {
        &self.tasks[..self.train]
    }

    pub fn val_fold(&self) -> &[Task] {
        &self.tasks[self.train..self.train + self.val]
    }

    pub fn test_fold(&self) -> &[Task] {
        &self.tasks[self.train + self.val..self.train + self.val + self.test]
    }

    pub fn all(&self) -> &[Task] {
        &self.tasks
    }
}

/// Generate `count` tasks with uniformly placed cups and split them into
/// folds in generation order.
pub fn generate_tasks(cfg: &TaskGenConfig, seed: u64) -> TaskSet {
    assert!(cfg.train + cfg.val + cfg.test <= cfg.count, "folds exceed task count");
    let mut rng = derive(seed, "tasks");
    let tasks = (0..cfg.count)
        .map(|id| {
            let left = rng.random_range(cfg.cup_min_x..cfg.cup_max_x);
            let task = Task {
                id: id as u32,
                cup_left_x: left,
                cup_right_x: left + cfg.cup_width,
                cup_floor_y: 0.0,
                cup_wall_height: cfg.wall_height,
                launch_origin: Vec2::new(cfg.launch_origin.0, cfg.launch_origin.1),
                require_bounce: cfg.require_bounce,
            };
            task.validate().expect("generator produced an invalid task");
            task
        })
        .collect();
    TaskSet { tasks, train: cfg.train, val: cfg.val, test: cfg.test }
}

#[derive(Debug, Serialize, Deserialize)]
struct TaskRow {
    id: u32,
    cup_left_x: f64,
    cup_right_x: f64,
    cup_floor_y: f64,
    cup_wall_height: f64,
    launch_x: f64,
    launch_y: f64,
    require_bounce: bool,
    fold: String,
}

/// Write a task set as CSV, one record per task, with its fold label.
pub fn save_tasks_csv(set: &TaskSet, path: &Path) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(File::create(path)?);
    for (i, t) in set.tasks.iter().enumerate() {
        let fold = if i < set.train {
            "train"
        } else if i < set.train + set.val {
            "val"
        } else {
            "test"
        };
        w.serialize(TaskRow {
            id: t.id,
            cup_left_x: t.cup_left_x,
            cup_right_x: t.cup_right_x,
            cup_floor_y: t.cup_floor_y,
            cup_wall_height: t.cup_wall_height,
            launch_x: t.launch_origin.x,
            launch_y: t.launch_origin.y,
            require_bounce: t.require_bounce,
            fold: fold.to_string(),
        })
        .map_err(io::Error::other)?;
    }
    w.flush()
}

/// Load a task set written by [`save_tasks_csv`], validating geometry.
pub fn load_tasks_csv(path: &Path) -> io::Result<TaskSet> {
    let mut r = csv::Reader::from_reader(File::open(path)?);
    let mut tasks = Vec::new();
    let (mut train, mut val, mut test) = (0, 0, 0);
    for row in r.deserialize::<TaskRow>() {
        let row = row.map_err(io::Error::other)?;
        let task = Task {
            id: row.id,
            cup_left_x: row.cup_left_x,
            cup_right_x: row.cup_right_x,
            cup_floor_y: row.cup_floor_y,
            cup_wall_height: row.cup_wall_height,
            launch_origin: Vec2::new(row.launch_x, row.launch_y),
            require_bounce: row.require_bounce,
        };
        task.validate().map_err(io::Error::other)?;
        match row.fold.as_str() {
            "train" => train += 1,
            "val" => val += 1,
            "test" => test += 1,
            other => return Err(io::Error::other(format!("unknown fold {other}"))),
        }
        tasks.push(task);
    }
    Ok(TaskSet { tasks, train, val, test })
}

/// Dump a trajectory as CSV rows of `step,x,y,vx,vy`.
pub fn write_trajectory_csv(traj: &Trajectory, path: &Path) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(File::create(path)?);
    w.write_record(["step", "x", "y", "vx", "vy"]).map_err(io::Error::other)?;
    for (i, s) in traj.states.iter().enumerate() {
        w.write_record(&[
            i.to_string(),
            s.position.x.to_string(),
            s.position.y.to_string(),
            s.velocity.x.to_string(),
            s.velocity.y.to_string(),
        ])
        .map_err(io::Error::other)?;
    }
    w.flush()
}
