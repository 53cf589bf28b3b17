List<String> myList = new ArrayList<String>();
String[] items={"apple","orange","banana",
               "mango","grape"};
for(String item:items){
    myList.add(item);  }
//deleting a particular item from the list
Iterator<String> it = myList.iterator();
while(it.hasNext()){
   String value = it.next();
    if(value.equals("banana"))
     myList.remove(value);  }
