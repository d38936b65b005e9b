//! Game definition files.
//!
//! ```json
//! { "meta": { "name": "rps" },
//!   "players": [{ "actions": 3 }],
//!   "edges": [{ "from": 0, "to": 0, "matrix": [[0, 1, -1], [-1, 0, 1], [1, -1, 0]] }] }
//! ```
//!
//! Indices are 0-based and `from == to` is a self-loop. `meta` is free-form
//! and ignored by the engine apart from an optional `name`.

use std::path::Path;

use replicator_core::{Game, GameSpec, Matrix};
use serde::{Deserialize, Serialize};

use crate::failure::Failure;

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct PlayerEntry {
    pub actions: usize,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct EdgeEntry {
    pub from: usize,
    pub to: usize,
    pub matrix: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct GameFile {
    #[serde(default)]
    pub meta: serde_json::Value,
    pub players: Vec<PlayerEntry>,
    pub edges: Vec<EdgeEntry>,
}

pub struct LoadedGame {
    pub name: String,
    pub game: Game,
}

impl GameFile {
    pub fn to_game(&self) -> Result<Game, Failure> {
        let mut spec = GameSpec::new(self.players.iter().map(|p| p.actions).collect());
        for e in &self.edges {
            spec = spec.edge(e.from, e.to, Matrix::from_rows(&e.matrix)?);
        }
        Ok(spec.validate()?)
    }
}

pub fn load(path: &Path) -> Result<LoadedGame, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    let file: GameFile = serde_json::from_str(&text).map_err(|e| Failure::parse(path, e))?;
    let name = file
        .meta
        .get("name")
        .and_then(|v| v.as_str())
        .map(str::to_owned)
        .or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .unwrap_or_else(|| "game".to_owned());
    Ok(LoadedGame {
        name,
        game: file.to_game()?,
    })
}
