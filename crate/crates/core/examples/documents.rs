//! Table and report documents: text and JSON forms, and witness replay
//! through the CLI layer.

use ordagg::cli::{cmd_classify, cmd_represent, cmd_verify_witness, ClassifyOptions};
use ordagg::document::{ReportDocument, TableDocument};
use ordagg::meaningfulness::Family;
use ordagg::scale::IntervalSpec;

const RATINGS: &str = "\
arity: 2
input_sizes: 3 3
output_size: 3
interval: closed
input_labels: bad ok good
output_labels: bad ok good
0 0 -> 0
0 1 -> 0
0 2 -> 0
1 0 -> 0
1 1 -> 1
1 2 -> 2
2 0 -> 0
2 1 -> 2
2 2 -> 2
";

fn main() -> ordagg::Result<()> {
    let doc = TableDocument::parse(RATINGS)?;
    assert_eq!(TableDocument::parse(&doc.to_text())?, doc);
    assert_eq!(TableDocument::parse(&doc.to_json())?, doc);
    println!("cell (good, ok) is {}", doc.cell_label(&[2, 1]));

    let all = vec![Family::OrderInvariant, Family::CmSingle, Family::CmIndependent];
    let (report, code) = cmd_classify(doc, &ClassifyOptions::new(all.clone()))?;
    println!("classify exit {code}\n{}", report.to_text());
    let again = ReportDocument::parse(&report.to_json())?;
    let (msg, code) = cmd_verify_witness(&again)?;
    println!("verify-witness exit {code}: {msg}");

    let median = cmd_represent("median3", 3, IntervalSpec::OPEN)?;
    let (_, code) = cmd_classify(median, &ClassifyOptions::new(all))?;
    println!("median3 representative classifies with exit {code}");
    Ok(())
}
