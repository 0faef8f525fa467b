fn main() {
    println!("graft placeholder");
}
