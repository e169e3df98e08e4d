fn main() {
    println!("gog placeholder");
}
