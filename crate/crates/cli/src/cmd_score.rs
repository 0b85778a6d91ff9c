//! The `score` subcommand: read a pre-aligned sequence set, score every
//! pair with gap penalties, and write the standardized similarity grid.

use dcgkit::seqscore::{
    pair_score_raw, parse_alignment, similarity_matrix, AlignmentFormat, ScoringParams,
};
use dcgkit::Result;

use crate::manifest::ManifestBuilder;
use crate::{Outcome, ScoreArgs};

pub fn run(args: &ScoreArgs) -> Result<Outcome> {
    let mut mb = ManifestBuilder::new("score", args.seed, &args.out)?;
    mb.param("alignment", args.alignment.display());
    let format: AlignmentFormat = args.format.parse()?;
    mb.param("format", &args.format);
    mb.param("open", args.open);
    mb.param("extend", args.extend);
    let text = mb.read_input(&args.alignment)?;
    let aln = parse_alignment(&text, format)?;
    let params = ScoringParams::new(args.open, args.extend)?;
    if args.verbose {
        for i in 0..aln.n_sequences() {
            for j in (i + 1)..aln.n_sequences() {
                let ps = pair_score_raw(aln.sequence(i), aln.sequence(j), &params)?;
                println!(
                    "{} vs {}: raw={} common_length={} normalized={}",
                    aln.names()[i],
                    aln.names()[j],
                    ps.raw,
                    ps.common_length,
                    ps.normalized
                );
            }
        }
    }
    let grid = similarity_matrix(&aln, &params)?;
    mb.write_output("similarity.csv", &grid.to_csv())?;
    mb.finish()?;
    Ok(Outcome::Clean)
}
