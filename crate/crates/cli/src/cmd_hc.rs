//! The `hc` subcommand: classical agglomeration, either as the full
//! dendrogram or cut into a stacked level tree.

use dcgkit::hc::{dendrogram_to_tree, hc_build, Linkage};
use dcgkit::Result;

use crate::manifest::ManifestBuilder;
use crate::util::parse_levels;
use crate::{HcArgs, Outcome};

pub fn run(args: &HcArgs) -> Result<Outcome> {
    let mut mb = ManifestBuilder::new("hc", args.seed, &args.out)?;
    let d = crate::cmd_dcg::ingest(&args.input, &mut mb)?;
    let link: Linkage = args.linkage.parse()?;
    mb.param("linkage", &args.linkage);
    let dg = hc_build(&d, link)?;
    let newick = match &args.levels {
        Some(spec) => {
            mb.param("levels", spec);
            let ks = parse_levels(spec)?;
            dendrogram_to_tree(&dg, &ks)?.to_newick()
        }
        None => dg.to_newick(),
    };
    mb.write_output("tree.nwk", &(newick + "\n"))?;
    mb.finish()?;
    Ok(Outcome::Clean)
}
