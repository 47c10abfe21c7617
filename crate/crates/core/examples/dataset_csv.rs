//! Export a generated dataset and its ground truth as CSV, then read both
//! back.

use pricebounds::dataset_csv::{
    read_datasets_csv, read_ground_truth_csv, write_datasets_csv, write_ground_truth_csv,
};
use pricebounds::synthetic::{generate_dataset, SyntheticSpec};

fn main() -> pricebounds::Result<()> {
    let (truth, data) = generate_dataset(&SyntheticSpec::new(2, 4, 0.5, 3))?;

    let mut buf = Vec::new();
    write_datasets_csv(&mut buf, &[(0, &data)])?;
    print!("{}", String::from_utf8_lossy(&buf));
    assert_eq!(read_datasets_csv(buf.as_slice())?[&0], data);

    let mut buf = Vec::new();
    write_ground_truth_csv(&mut buf, &truth)?;
    print!("{}", String::from_utf8_lossy(&buf));
    assert_eq!(read_ground_truth_csv(buf.as_slice())?, truth);
    Ok(())
}
