//! Round trip of spaces, weights and subsets through the JSON file formats,
//! then the same computation the `muck` binary runs for those files.

use muckenhoupt::cli::{run_command, Opts, RunConfig};
use muckenhoupt::io::{load_function, load_space, save_function, save_space, save_subset};
use muckenhoupt::space::build_grid_space;
use muckenhoupt::Subset;

fn main() -> muckenhoupt::Result<()> {
    let dir = std::env::temp_dir().join("muck-files-example");
    std::fs::create_dir_all(&dir)?;

    let s = build_grid_space(1, 3, 1.0)?;
    let e = Subset::new(3, vec![0, 1])?;
    save_space(dir.join("space.json"), &s)?;
    save_function(dir.join("w.json"), &[1.0, 4.0, 0.0], Some(&e))?;
    save_subset(dir.join("e.json"), &e)?;

    let back = load_space(dir.join("space.json"))?;
    let w = load_function(dir.join("w.json"), back.len())?;
    println!("loaded {} points, weight {:?} on {:?}", back.len(), w.values, w.support.map(|s| s.ids().to_vec()));

    let opts = Opts {
        space: Some(dir.join("space.json")),
        weight: Some(dir.join("w.json")),
        subset: Some(dir.join("e.json").display().to_string()),
        p: Some(2.0),
        ..Opts::default()
    };
    let outcome = run_command(&RunConfig::new("characteristic", opts))?;
    print!("{}", outcome.report_text());
    Ok(())
}
